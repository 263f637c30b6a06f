#include "doctest.h"

#include <cmath>
#include <queue>

#include "jade/config.hpp"
#include "jade/devices.hpp"
#include "jade/engine.hpp"
#include "jade/scenarios.hpp"

using namespace jade;
using namespace jade::scenarios;

namespace {

RunConfig load_asset_config(const char* name) {
    std::string path = std::string(JADE_ASSETS_DIR) + "/configs/" + name;
    ConfigResult parsed = load_config_file(path, strategy_info);
    for (const auto& diag : parsed.diagnostics) {
        CAPTURE(diag.message);
        CHECK(diag.severity != Severity::Error);
    }
    REQUIRE(parsed.config.has_value());
    return *parsed.config;
}

RunConfig load_generated(const std::string& xml) {
    ConfigResult parsed =
        load_config(xml, std::string(JADE_ASSETS_DIR) + "/csm", strategy_info);
    for (const auto& diag : parsed.diagnostics) {
        CAPTURE(diag.message);
        CHECK(diag.severity != Severity::Error);
    }
    REQUIRE(parsed.config.has_value());
    return *parsed.config;
}

std::vector<PolarSighting> sight_from(const Vec2& self, const std::vector<Vec2>& others) {
    std::vector<PolarSighting> out;
    for (const Vec2& p : others) {
        Vec2 rel = p - self;
        out.push_back({std::atan2(rel.y, rel.x), rel.norm()});
    }
    return out;
}

}  // namespace

TEST_CASE("circle rule holds position without enough neighbors") {
    CHECK(circle_step({1, 1}, {}, 3, 1).norm() == 0);
    CHECK(circle_step({1, 1}, {{0.3, 2.0}}, 3, 1).norm() == 0);
}

TEST_CASE("a regular polygon is a fixed point of the circle rule") {
    for (int n : {3, 6, 8}) {
        std::vector<Vec2> ring;
        Vec2 center{5, 4};
        for (int i = 0; i < n; ++i) {
            double a = kTwoPi * i / n + 0.3;
            ring.push_back(center + dir(a) * 3.0);
        }
        for (int self = 0; self < n; ++self) {
            std::vector<Vec2> others;
            for (int i = 0; i < n; ++i) {
                if (i != self) others.push_back(ring[std::size_t(i)]);
            }
            Vec2 v = circle_step(ring[std::size_t(self)],
                                 sight_from(ring[std::size_t(self)], others), 3.0, 1.0);
            CHECK(v.norm() < 1e-12);
        }
    }
}

TEST_CASE("on-circle but angularly crowded moves tangentially only") {
    // Neighbors sum to (0, -9) so the centroid is exactly (0, -3), which puts
    // self precisely on the target radius; the angular gaps are uneven.
    Vec2 self{0, 0};
    std::vector<Vec2> others{{3, -4}, {-3, -5}};
    Vec2 v = circle_step(self, sight_from(self, others), 3.0, 1.0);
    Vec2 radial = self - Vec2{0, -3};
    CHECK(std::abs(v.dot(radial.normalized())) < 1e-12);
    CHECK(v.norm() > 0.01);
}

TEST_CASE("circle rule output is speed-clamped") {
    Vec2 v = circle_step({40, 0}, sight_from({40, 0}, {{0, 1}, {0, -1}}), 3.0, 1.0);
    CHECK(v.norm() <= 1.0 + 1e-12);
}

TEST_CASE("chain rule steers to the neighbor midpoint and clamps") {
    CHECK(chain_step({5, 5}, {4, 5}, {6, 5}, 1).norm() == 0);
    Vec2 v = chain_step({0, 0}, {10, 0}, {10, 4}, 1);
    CHECK(v.norm() == doctest::Approx(1.0));
    Vec2 expect = Vec2{10, 2}.normalized();
    CHECK(v.normalized().dot(expect) == doctest::Approx(1.0));
    // A single agent between the anchors converges on the anchor midpoint.
    Vec2 lone = chain_step({3, 1}, {1, 6}, {11, 6}, 100);
    CHECK(lone == Vec2{3, 5});
}

TEST_CASE("formation error metrics") {
    std::vector<Vec2> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    CHECK(circle_error(square, 3) == doctest::Approx(0).epsilon(1e-12));

    std::vector<Vec2> hexagon;
    for (int i = 0; i < 6; ++i) hexagon.push_back(dir(kTwoPi * i / 6) * 2.0);
    CHECK(circle_error(hexagon, 2) < 1e-12);

    std::vector<Vec2> bent = hexagon;
    bent[0] += Vec2{0.5, 0.3};
    CHECK(circle_error(bent, 2) > 0.01);

    std::vector<Vec2> pile{{2, 2}, {2, 2}, {2, 2}};
    CHECK(std::isinf(circle_error(pile, 3)));

    Vec2 a{1, 6}, b{11, 6};
    std::vector<Vec2> uniform;
    for (int i = 1; i <= 5; ++i) uniform.push_back({1 + 10.0 * i / 6, 6});
    CHECK(chain_error(uniform, a, b) < 1e-12);

    std::vector<Vec2> sag = uniform;
    sag[2].y -= 0.4;
    CHECK(chain_error(sag, a, b) > 0.01);
    CHECK(std::isinf(chain_error(uniform, a, a)));
}

TEST_CASE("steer_to_point rotates in place, then drives, then stops") {
    Pose pose{{2, 2}, 0};
    auto [sl, sr] = steer_to_point(pose, {2, 2}, 1, 0.2, 0.1);
    CHECK(sl == 0);
    CHECK(sr == 0);

    auto [rl, rr] = steer_to_point(pose, {2, 5}, 1, 0.2, 0.1);  // target straight left
    CHECK(rl == -rr);
    CHECK(rr > 0);

    auto [fl, fr] = steer_to_point(pose, {4, 2}, 1, 0.2, 0.1);
    CHECK(fl == fr);
    CHECK(fl == doctest::Approx(1.0));  // far target saturates at max speed

    auto [nl, nr] = steer_to_point(pose, {2.03, 2}, 1, 0.2, 0.1);
    CHECK(nl == doctest::Approx(0.3));  // near target: exactly dist/dt
    CHECK(nl == nr);
}

TEST_CASE("steer_arc turns toward the bearing within the speed cap") {
    auto [sl, sr] = steer_arc(0, 0.8, 1, 0.2);
    CHECK(sl == doctest::Approx(0.8));
    CHECK(sl == sr);
    auto [ll, lr] = steer_arc(0.6, 0.8, 1, 0.2);
    CHECK(lr > ll);
    CHECK(std::max(std::abs(ll), std::abs(lr)) <= 1.0 + 1e-12);
    auto [bl, br] = steer_arc(kPi - 0.01, 0.8, 1, 0.2);  // target behind: spin hard
    CHECK(br > 0);
    CHECK(br - bl > 0.5);
}

TEST_CASE("generated mazes are perfect and fully connected") {
    for (std::uint64_t seed : {1ull, 9ull, 77ull}) {
        MazeSpec maze = generate_maze(15, 15, seed);
        int open = 0;
        for (auto o : maze.open_right) open += o;
        for (auto o : maze.open_up) open += o;
        CHECK(open == 15 * 15 - 1);  // spanning tree

        std::vector<int> dist(15 * 15, -1);
        std::queue<int> frontier;
        frontier.push(0);
        dist[0] = 0;
        while (!frontier.empty()) {
            int cell = frontier.front();
            frontier.pop();
            int r = cell / 15, c = cell % 15;
            auto visit = [&](int nr, int nc) {
                int next = nr * 15 + nc;
                if (dist[std::size_t(next)] < 0) {
                    dist[std::size_t(next)] = dist[std::size_t(cell)] + 1;
                    frontier.push(next);
                }
            };
            if (c + 1 < 15 && maze.open_right[std::size_t(cell)]) visit(r, c + 1);
            if (c > 0 && maze.open_right[std::size_t(cell) - 1]) visit(r, c - 1);
            if (r + 1 < 15 && maze.open_up[std::size_t(cell)]) visit(r + 1, c);
            if (r > 0 && maze.open_up[std::size_t(cell) - 15]) visit(r - 1, c);
        }
        for (int d : dist) CHECK(d >= 0);

        for (const MazeSpec::Rect& wall : maze.walls) {
            CHECK(wall.origin.x >= -1e-12);
            CHECK(wall.origin.y >= -1e-12);
            CHECK(wall.origin.x + wall.width <= maze.width() + 1e-12);
            CHECK(wall.origin.y + wall.height <= maze.height() + 1e-12);
        }
    }
    CHECK(generate_maze(15, 15, 1).open_right != generate_maze(15, 15, 2).open_right);
}

TEST_CASE("maze configs load cleanly and the walls survive the trip") {
    MazeSpec maze = generate_maze(8, 8, 4);
    RunConfig cfg = load_generated(maze_config_xml(maze, 30000));
    CHECK(cfg.world.obstacles.size() == maze.walls.size());
    CHECK(cfg.agents.size() == 1);
    CHECK(cfg.agents[0].strategy == "wall_follow");
    CHECK(cfg.scenario.name == "maze");
}

TEST_CASE("the strategy catalog knows its names") {
    CHECK(strategy_info("chase").has_value());
    CHECK(strategy_info("evade").has_value());
    CHECK(strategy_info("wall_follow").has_value());
    CHECK(strategy_info("mushroom_random").has_value());
    CHECK(strategy_info("mushroom_return").has_value());
    CHECK(strategy_info("circle").has_value());
    CHECK(strategy_info("chain").has_value());
    CHECK_FALSE(strategy_info("swarm_overlord").has_value());

    AgentSpec spec;
    spec.strategy = "swarm_overlord";
    CHECK_THROWS_AS((void)make_strategy(spec, {}), EngineError);
}

TEST_CASE("bundled configs validate with the catalog") {
    for (const char* name : {"chase.xml", "mushrooms_a.xml", "mushrooms_b.xml",
                             "corridor.xml", "circle6.xml", "chain5.xml"}) {
        CAPTURE(name);
        RunConfig cfg = load_asset_config(name);
        CHECK_FALSE(cfg.agents.empty());
    }
    RunConfig bad;
    bad.scenario.name = "tournament";
    CHECK_THROWS_AS((void)hooks_for(bad), EngineError);
}

TEST_CASE("the hunter catches the quarry") {
    RunConfig cfg = load_asset_config("chase.xml");
    cfg.seed = 3;
    Engine engine(cfg, Mode::Online, hooks_for(cfg));
    RunReport report = engine.run();
    CHECK(report.reason == "scenario");
    REQUIRE(report.metrics.count("catch_tick") == 1);
    CHECK(report.metrics["catch_tick"] == double(report.ticks));
}

TEST_CASE("the wall follower exits the corridor inside the whisker band") {
    RunConfig cfg = load_asset_config("corridor.xml");
    ScenarioHooks hooks = hooks_for(cfg);
    auto base_on_tick = hooks.on_tick;
    auto violations = std::make_shared<int>(0);
    hooks.on_tick = [base_on_tick, violations](const Engine& engine) {
        if (base_on_tick) base_on_tick(engine);
        if (engine.tick_count() < 300) return;  // acquisition phase
        const Peer& runner = engine.peers().front();
        ProximitySensor left{"left", kPi / 2, 1.2};
        auto reading =
            read_proximity(left, runner.pose, runner.spec.body_radius, 0, engine.world(), {});
        if (!reading || *reading < 0.05 || *reading > 0.55) ++*violations;
    };
    Engine engine(cfg, Mode::Online, hooks);
    RunReport report = engine.run();
    CHECK(report.reason == "scenario");
    CHECK(*violations == 0);
    CHECK(report.metrics["path_length"] > 7.0);
}

TEST_CASE("a small maze is solved by wall following") {
    MazeSpec maze = generate_maze(8, 8, 4);
    RunConfig cfg = load_generated(maze_config_xml(maze, 30000));
    Engine engine(cfg, Mode::Online, hooks_for(cfg));
    RunReport report = engine.run();
    CHECK(report.reason == "scenario");
    CHECK(report.metrics.count("exit_tick") == 1);
}

TEST_CASE("mode A foragers clear the forest without hard collisions") {
    RunConfig cfg = load_asset_config("mushrooms_a.xml");
    cfg.seed = 11;
    cfg.scenario.params["mushrooms"] = 6;
    cfg.max_ticks = 20000;

    ScenarioHooks hooks = hooks_for(cfg);
    auto bad_counts = std::make_shared<int>(0);
    auto hard_collisions = std::make_shared<int>(0);
    hooks.on_tick = [bad_counts, hard_collisions](const Engine& engine) {
        int in_field = 0, carried = 0, stored = 0;
        engine.resource_counts(in_field, carried, stored);
        if (in_field + carried + stored != 6) ++*bad_counts;
        const auto& peers = engine.peers();
        for (std::size_t i = 0; i < peers.size(); ++i) {
            for (std::size_t j = i + 1; j < peers.size(); ++j) {
                double gap = distance(peers[i].pose.position, peers[j].pose.position);
                if (gap < peers[i].spec.body_radius + peers[j].spec.body_radius - 1e-9) {
                    ++*hard_collisions;
                }
            }
        }
    };
    Engine engine(cfg, Mode::Online, hooks);
    RunReport report = engine.run();
    CHECK(report.reason == "scenario");
    CHECK(*bad_counts == 0);
    CHECK(*hard_collisions == 0);

    double crop = 0;
    for (const auto& [key, value] : report.metrics) {
        if (key.rfind("crop_", 0) == 0) crop += value;
    }
    int in_field = 0, carried = 0, stored = 0;
    engine.resource_counts(in_field, carried, stored);
    CHECK(in_field == 0);
    CHECK(crop == double(stored));
}

TEST_CASE("six agents form a circle from a random start") {
    RunConfig cfg = load_generated(circle_config_xml(6, 3, 5, 20000));
    Engine engine(cfg, Mode::Online, hooks_for(cfg));
    RunReport report = engine.run();
    CHECK(report.reason == "scenario");
    CHECK(report.metrics["circle_error"] < 0.05);
}

TEST_CASE("five agents form a chain and deviation never grows") {
    RunConfig cfg = load_generated(chain_config_xml(5, 5, 20000));
    ScenarioHooks hooks = hooks_for(cfg);
    Vec2 a{1, 6}, b{11, 6};
    auto worst = std::make_shared<double>(1e100);
    auto growths = std::make_shared<int>(0);
    hooks.on_tick = [a, b, worst, growths](const Engine& engine) {
        double peak = 0;
        Vec2 unit = (b - a).normalized();
        for (const Peer& peer : engine.peers()) {
            peak = std::max(peak, std::abs(unit.cross(peer.pose.position - a)));
        }
        if (*worst < 1e99 && peak > *worst + 1e-9) ++*growths;
        *worst = std::min(*worst, peak);
    };
    Engine engine(cfg, Mode::Online, hooks);
    RunReport report = engine.run();
    CHECK(report.reason == "scenario");
    CHECK(report.metrics["chain_error"] < 0.02);
    CHECK(*growths == 0);
}
