#include <cmath>

#include "jade/logfmt.hpp"
#include "jade/rng.hpp"
#include "jade/scenarios.hpp"

namespace jade::scenarios {

namespace {

double param_or(const RunConfig& config, const std::string& name, double fallback) {
    auto it = config.scenario.params.find(name);
    return it == config.scenario.params.end() ? fallback : it->second;
}

std::vector<Vec2> peer_positions(const Engine& engine) {
    std::vector<Vec2> out;
    for (const Peer& peer : engine.peers()) out.push_back(peer.pose.position);
    return out;
}

/// Contact with another agent inside the front quarter window.
bool front_agent_contact(const Peer& peer) {
    if (!peer.contact || peer.contact->other.kind != ObjectRef::Kind::Agent) return false;
    Vec2 rel = peer.contact->point - peer.pose.position;
    double bearing = wrap_angle(std::atan2(rel.y, rel.x) - peer.pose.heading);
    return std::abs(bearing) <= kPi / 4;
}

ScenarioHooks chase_hooks() {
    ScenarioHooks hooks;
    auto caught = [](const Engine& engine) {
        for (const Peer& peer : engine.peers()) {
            if (peer.spec.strategy == "chase" && front_agent_contact(peer)) return true;
        }
        return false;
    };
    hooks.terminated = caught;
    hooks.finish = [caught](const Engine& engine, std::map<std::string, double>& metrics) {
        if (caught(engine)) metrics["catch_tick"] = double(engine.tick_count());
    };
    return hooks;
}

ScenarioHooks maze_hooks(const RunConfig& config) {
    double x = param_or(config, "exit_x", 0);
    double y = param_or(config, "exit_y", 0);
    double w = param_or(config, "exit_w", 1);
    double h = param_or(config, "exit_h", 1);
    auto inside = [x, y, w, h](const Engine& engine) {
        const Vec2& p = engine.peers().front().pose.position;
        return p.x >= x && p.x <= x + w && p.y >= y && p.y <= y + h;
    };
    ScenarioHooks hooks;
    hooks.terminated = inside;
    hooks.finish = [inside](const Engine& engine, std::map<std::string, double>& metrics) {
        const Peer& runner = engine.peers().front();
        const OdometryState& odo = runner.odometry;
        metrics["path_length"] =
            (odo.accum_left + odo.accum_right) / 2 * kTwoPi * odo.wheel_radius;
        if (inside(engine)) metrics["exit_tick"] = double(engine.tick_count());
    };
    return hooks;
}

ScenarioHooks mushroom_hooks(const RunConfig& config) {
    ScenarioHooks hooks;
    int count = int(param_or(config, "mushrooms", 40));
    std::uint64_t seed = config.seed;
    hooks.setup = [count, seed](Engine& engine) {
        Rng rng = Rng(seed).stream(0x4D555348);
        const WorldMap& world = engine.world();
        const double margin = 1.0;
        for (int placed = 0; placed < count;) {
            Vec2 p{rng.uniform(margin, world.width - margin),
                   rng.uniform(margin, world.height - margin)};
            bool near_home = false;
            for (const HomeZone& home : world.homes) {
                if (p.x >= home.origin.x - 0.5 && p.x <= home.origin.x + home.width + 0.5 &&
                    p.y >= home.origin.y - 0.5 && p.y <= home.origin.y + home.height + 0.5) {
                    near_home = true;
                }
            }
            if (near_home) continue;
            engine.add_resource(p);
            ++placed;
        }
    };
    if (param_or(config, "mode_a", 1) > 0.5) {
        hooks.terminated = [](const Engine& engine) {
            int in_field = 0, carried = 0, stored = 0;
            engine.resource_counts(in_field, carried, stored);
            return in_field == 0;
        };
    }
    hooks.finish = [](const Engine& engine, std::map<std::string, double>& metrics) {
        for (const Peer& peer : engine.peers()) metrics["crop_" + peer.spec.name] = 0;
        for (const Resource& res : engine.world().resources) {
            if (res.status == Resource::Status::Stored) {
                metrics["crop_" + res.store_owner] += 1;
            }
        }
        metrics["thefts"] = double(engine.thefts().size());
    };
    return hooks;
}

ScenarioHooks circle_hooks(const RunConfig& config) {
    double radius = param_or(config, "radius", 3);
    double stop = param_or(config, "stop_error", 0.05);
    ScenarioHooks hooks;
    hooks.terminated = [radius, stop](const Engine& engine) {
        return circle_error(peer_positions(engine), radius) < stop;
    };
    hooks.finish = [radius](const Engine& engine, std::map<std::string, double>& metrics) {
        metrics["circle_error"] = circle_error(peer_positions(engine), radius);
    };
    return hooks;
}

ScenarioHooks chain_hooks(const RunConfig& config) {
    Vec2 a{param_or(config, "ax", 1), param_or(config, "ay", 6)};
    Vec2 b{param_or(config, "bx", 11), param_or(config, "by", 6)};
    double stop = param_or(config, "stop_error", 0.02);
    ScenarioHooks hooks;
    hooks.terminated = [a, b, stop](const Engine& engine) {
        return chain_error(peer_positions(engine), a, b) < stop;
    };
    hooks.finish = [a, b](const Engine& engine, std::map<std::string, double>& metrics) {
        metrics["chain_error"] = chain_error(peer_positions(engine), a, b);
    };
    return hooks;
}

}  // namespace

ScenarioHooks hooks_for(const RunConfig& config) {
    const std::string& name = config.scenario.name;
    ScenarioHooks hooks;
    if (name == "chase") {
        hooks = chase_hooks();
    } else if (name == "maze") {
        hooks = maze_hooks(config);
    } else if (name == "mushrooms") {
        hooks = mushroom_hooks(config);
    } else if (name == "circle") {
        hooks = circle_hooks(config);
    } else if (name == "chain") {
        hooks = chain_hooks(config);
    } else if (!name.empty()) {
        throw EngineError("unknown scenario '" + name + "'");
    }
    hooks.make_policy = [](const AgentSpec& spec, const AgentContext& ctx) {
        return make_strategy(spec, ctx);
    };
    return hooks;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Pose> scatter_poses(int n, std::uint64_t seed, double lo, double hi) {
    Rng rng = Rng(seed).stream(0x53544152);
    std::vector<Pose> poses;
    while (int(poses.size()) < n) {
        Vec2 p{rng.uniform(lo, hi), rng.uniform(lo, hi)};
        bool clear = true;
        for (const Pose& other : poses) {
            if (distance(other.position, p) < 0.8) clear = false;
        }
        if (clear) poses.emplace_back(p, rng.uniform(-kPi, kPi));
    }
    return poses;
}

void append_formation_agent(std::string& xml, int index, const Pose& pose,
                            const char* strategy) {
    xml += "<agent name=\"f" + std::to_string(index) + "\" strategy=\"";
    xml += strategy;
    xml += "\" csm=\"formation.csm\" x=\"" + format_double(pose.position.x) + "\" y=\"" +
           format_double(pose.position.y) + "\" heading=\"" + format_double(pose.heading) +
           "\">";
    xml += "<device type=\"drive\" wheel_base=\"0.2\" max_speed=\"1\" max_accel=\"100\"/>";
    xml += "</agent>";
}

std::string formation_header(std::uint64_t seed, long long max_ticks) {
    return "<run seed=\"" + std::to_string(seed) + "\" tick=\"0.1\" max_ticks=\"" +
           std::to_string(max_ticks) +
           "\" near_threshold=\"100\" checkpoint_every=\"200\">"
           "<world w=\"12\" h=\"12\"></world>";
}

}  // namespace

std::string circle_config_xml(int agents, double target_radius, std::uint64_t seed,
                              long long max_ticks) {
    std::string xml = formation_header(seed, max_ticks);
    xml += "<scenario name=\"circle\" radius=\"" + format_double(target_radius) +
           "\" stop_error=\"0.05\"/>";
    std::vector<Pose> poses = scatter_poses(agents, seed, 2, 10);
    for (int i = 0; i < agents; ++i) append_formation_agent(xml, i, poses[i], "circle");
    xml += "</run>";
    return xml;
}

std::string chain_config_xml(int agents, std::uint64_t seed, long long max_ticks) {
    std::string xml = formation_header(seed, max_ticks);
    xml += "<scenario name=\"chain\" ax=\"1\" ay=\"6\" bx=\"11\" by=\"6\" "
           "stop_error=\"0.02\"/>";
    std::vector<Pose> poses = scatter_poses(agents, seed, 2, 10);
    for (int i = 0; i < agents; ++i) append_formation_agent(xml, i, poses[i], "chain");
    xml += "</run>";
    return xml;
}

}  // namespace jade::scenarios
