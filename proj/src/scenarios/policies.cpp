#include <algorithm>
#include <cmath>

#include "jade/rng.hpp"
#include "jade/scenarios.hpp"

namespace jade::scenarios {

namespace {

double mget(const Memory& memory, const std::string& name, double fallback) {
    return memory.get(name).value_or(fallback);
}

double param_or(const AgentContext& ctx, const std::string& name, double fallback) {
    auto it = ctx.params.find(name);
    return it == ctx.params.end() ? fallback : it->second;
}

void set_pair(Memory& memory, const char* left, const char* right,
              std::pair<double, double> wheels) {
    memory.set(left, wheels.first);
    memory.set(right, wheels.second);
}

/// Nearest scanned agent as (relative bearing, distance); distance is
/// kNoReading when nothing is disclosed, with the bearing of the first
/// scanned name as a blind fallback.
struct NearestScan {
    double bearing = 0;
    double dist = kNoReading;
    bool any = false;
};

NearestScan nearest_scanned(const Memory& memory) {
    NearestScan best;
    for (const auto& [name, value] : memory.scalars()) {
        if (name.rfind("scan_", 0) != 0) continue;
        std::size_t tail = name.rfind("_bearing");
        if (tail == std::string::npos || tail + 8 != name.size()) continue;
        double dist = mget(memory, name.substr(0, tail) + "_dist", kNoReading);
        if (!best.any || dist < best.dist) {
            best.bearing = value;
            best.dist = dist;
            best.any = true;
        }
    }
    return best;
}

Vec2 own_position(const Memory& memory) {
    return {mget(memory, "pos_x", 0), mget(memory, "pos_y", 0)};
}

// ---------------------------------------------------------------------------

/// Pure pursuit of the nearest scanned agent at full speed.
class ChasePolicy final : public Policy {
public:
    ChasePolicy(const AgentSpec& spec, const AgentContext& ctx)
        : max_speed_(ctx.max_speed),
          wheel_base_(ctx.wheel_base),
          catch_dist_(param_or(ctx, "catch_dist", 2 * spec.body_radius + 0.1)) {}

    void prestep(Memory& memory, const EventSet&, EventSet&) override {
        NearestScan prey = nearest_scanned(memory);
        set_pair(memory, "steer_l", "steer_r",
                 steer_arc(prey.bearing, max_speed_, max_speed_, wheel_base_));
        bool caught = mget(memory, "touch_front", 0) > 0.5 && prey.dist <= catch_dist_;
        memory.set("caught", caught ? 1.0 : 0.0);
    }

    std::vector<std::string> provided_variables() const override {
        return {"steer_l", "steer_r", "caught"};
    }

private:
    double max_speed_;
    double wheel_base_;
    double catch_dist_;
};

/// Wander on seeded random legs; flee straight away from any agent whose
/// distance is disclosed, bending away from the arena walls.
class EvadePolicy final : public Policy {
public:
    EvadePolicy(const AgentSpec&, const AgentContext& ctx)
        : rng_(Rng(ctx.rng_seed).stream(0x45564144)),
          max_speed_(ctx.max_speed),
          wheel_base_(ctx.wheel_base),
          world_w_(param_or(ctx, "world_w", 20)),
          world_h_(param_or(ctx, "world_h", 20)),
          threat_radius_(param_or(ctx, "threat_radius", ctx.near_threshold)) {}

    void prestep(Memory& memory, const EventSet&, EventSet&) override {
        Vec2 pos = own_position(memory);
        double heading = mget(memory, "heading", 0);

        NearestScan hunter = nearest_scanned(memory);
        bool threat = hunter.dist <= threat_radius_;
        memory.set("threat", threat ? 1.0 : 0.0);

        Vec2 repel = wall_repulsion(pos);
        Vec2 away = dir(heading + hunter.bearing + kPi) + repel * 1.5;
        double flee_bearing = wrap_angle(std::atan2(away.y, away.x) - heading);
        set_pair(memory, "flee_l", "flee_r",
                 steer_arc(flee_bearing, max_speed_, max_speed_, wheel_base_));

        double legs = mget(memory, "wander_t", 0) - 1;
        if (legs <= 0) {
            memory.set("wander_dir", rng_.uniform(-kPi, kPi));
            legs = 20 + double(rng_.next_below(40));
        }
        memory.set("wander_t", legs);
        Vec2 roam = dir(mget(memory, "wander_dir", 0)) + repel * 1.5;
        double roam_bearing = wrap_angle(std::atan2(roam.y, roam.x) - heading);
        set_pair(memory, "wander_l", "wander_r",
                 steer_arc(roam_bearing, 0.8 * max_speed_, max_speed_, wheel_base_));
    }

    std::vector<std::string> provided_variables() const override {
        return {"threat", "flee_l", "flee_r", "wander_l", "wander_r"};
    }

private:
    Vec2 wall_repulsion(const Vec2& pos) const {
        const double margin = 2.0;
        Vec2 repel{0, 0};
        auto push = [margin](double d) { return d < margin ? (margin - d) / margin : 0.0; };
        repel.x += push(pos.x);
        repel.x -= push(world_w_ - pos.x);
        repel.y += push(pos.y);
        repel.y -= push(world_h_ - pos.y);
        return repel;
    }

    Rng rng_;
    double max_speed_;
    double wheel_base_;
    double world_w_;
    double world_h_;
    double threat_radius_;
};

/// Keep the left whisker at its target distance; the machine handles the
/// turn-on-front-contact state, this policy only computes wheel speeds.
class WallFollowPolicy final : public Policy {
public:
    WallFollowPolicy(const AgentSpec&, const AgentContext& ctx)
        : max_speed_(ctx.max_speed),
          wheel_base_(ctx.wheel_base),
          target_(param_or(ctx, "wall_target", 0.25)),
          gain_(param_or(ctx, "wall_gain", 1.2)) {}

    void prestep(Memory& memory, const EventSet&, EventSet&) override {
        double cruise = 0.8 * max_speed_;
        double left = mget(memory, "prox_left", kNoReading);
        double ahead = mget(memory, "prox_ahead", kNoReading);

        std::pair<double, double> wheels;
        if (left >= 900) {
            // Lost the wall: arc left until the whisker finds it again.
            wheels = {0.4 * cruise, cruise};
        } else {
            double steer = std::clamp(gain_ * (left - target_), -0.55 * cruise, 0.55 * cruise);
            wheels = {cruise - steer, cruise + steer};
        }
        set_pair(memory, "w_l", "w_r", wheels);
        memory.set("turn", 0.3);
        memory.set("clear", ahead >= 0.35 ? 1.0 : 0.0);
    }

    std::vector<std::string> provided_variables() const override {
        return {"w_l", "w_r", "turn", "clear"};
    }

private:
    double max_speed_;
    double wheel_base_;
    double target_;
    double gain_;
};

/// Search / fetch / home wheel speeds for the forage machine. The return
/// variant revisits the position of its last find after each delivery.
class ForagePolicy final : public Policy {
public:
    ForagePolicy(const AgentSpec&, const AgentContext& ctx, bool revisit_finds)
        : rng_(Rng(ctx.rng_seed).stream(0x464F52)),
          revisit_finds_(revisit_finds),
          max_speed_(ctx.max_speed),
          wheel_base_(ctx.wheel_base),
          home_(ctx.home_center.value_or(Vec2{0, 0})),
          world_w_(param_or(ctx, "world_w", 20)),
          world_h_(param_or(ctx, "world_h", 20)),
          home_half_(param_or(ctx, "home_half", 0.7)) {}

    void prestep(Memory& memory, const EventSet&, EventSet&) override {
        Vec2 pos = own_position(memory);
        double heading = mget(memory, "heading", 0);
        double carrying = mget(memory, "carrying", 0);
        double cruise = 0.85 * max_speed_;

        // Carry edges mark finds and deliveries.
        double had = mget(memory, "had_carry", 0);
        if (carrying > 0.5 && had < 0.5) memory.set_position("last_find", pos);
        if (carrying < 0.5 && had > 0.5 && revisit_finds_ &&
            memory.get_position("last_find")) {
            memory.set("revisit", 1.0);
        }
        memory.set("had_carry", carrying);

        bool at_home = std::abs(pos.x - home_.x) <= home_half_ &&
                       std::abs(pos.y - home_.y) <= home_half_;
        memory.set("at_home", at_home ? 1.0 : 0.0);

        double vis_bearing = mget(memory, "vis_bearing", 0);
        double vis_dist = mget(memory, "vis_dist", kNoReading);
        double approach = vis_dist < 900 ? std::min(cruise, vis_dist + 0.15) : cruise;
        set_pair(memory, "f_l", "f_r",
                 steer_arc(vis_bearing, approach, max_speed_, wheel_base_));

        Vec2 to_home = home_ - pos;
        double home_bearing = wrap_angle(std::atan2(to_home.y, to_home.x) - heading);
        set_pair(memory, "h_l", "h_r",
                 steer_arc(home_bearing, std::min(cruise, to_home.norm() + 0.2), max_speed_,
                           wheel_base_));

        Vec2 goal = wander_goal(memory, pos);
        Vec2 to_goal = goal - pos;
        double goal_bearing = wrap_angle(std::atan2(to_goal.y, to_goal.x) - heading);
        set_pair(memory, "s_l", "s_r", steer_arc(goal_bearing, cruise, max_speed_, wheel_base_));
    }

    std::vector<std::string> provided_variables() const override {
        return {"s_l", "s_r", "f_l", "f_r", "h_l", "h_r", "at_home"};
    }

private:
    Vec2 wander_goal(Memory& memory, const Vec2& pos) {
        auto current = memory.get_position("wander_goal");
        double patience = mget(memory, "wander_patience", 0) - 1;
        bool arrived = current && distance(*current, pos) < 0.6;

        if (memory.get("revisit").value_or(0) > 0.5) {
            Vec2 find = *memory.get_position("last_find");
            if (distance(find, pos) < 0.6) {
                memory.set("revisit", 0.0);
            } else {
                memory.set("wander_patience", 400);
                memory.set_position("wander_goal", find);
                return find;
            }
        }
        if (!current || arrived || patience <= 0) {
            const double margin = 1.0;
            Vec2 fresh{rng_.uniform(margin, world_w_ - margin),
                       rng_.uniform(margin, world_h_ - margin)};
            memory.set_position("wander_goal", fresh);
            memory.set("wander_patience", 300);
            return fresh;
        }
        memory.set("wander_patience", patience);
        return *current;
    }

    Rng rng_;
    bool revisit_finds_;
    double max_speed_;
    double wheel_base_;
    Vec2 home_;
    double world_w_;
    double world_h_;
    double home_half_;
};

/// Positions every scanned agent from its disclosed bearing and distance,
/// then follows the pure formation rule.
class FormationPolicy final : public Policy {
public:
    enum class Shape { Circle, Chain };

    FormationPolicy(const AgentSpec& spec, const AgentContext& ctx, Shape shape)
        : shape_(shape),
          name_(spec.name),
          max_speed_(ctx.max_speed),
          wheel_base_(ctx.wheel_base),
          dt_(ctx.tick_duration),
          radius_(param_or(ctx, "radius", 3)),
          knn_(int(param_or(ctx, "k", 0))),
          anchor_a_(param_or(ctx, "ax", 0), param_or(ctx, "ay", 0)),
          anchor_b_(param_or(ctx, "bx", 0), param_or(ctx, "by", 0)) {}

    void prestep(Memory& memory, const EventSet&, EventSet&) override {
        Pose pose{own_position(memory), mget(memory, "heading", 0)};

        struct Sighting {
            std::string name;
            double bearing;  // world frame
            double dist;
        };
        std::vector<Sighting> seen;
        for (const auto& [key, bearing] : memory.scalars()) {
            if (key.rfind("scan_", 0) != 0) continue;
            std::size_t tail = key.rfind("_bearing");
            if (tail == std::string::npos || tail + 8 != key.size()) continue;
            double dist = mget(memory, key.substr(0, tail) + "_dist", kNoReading);
            if (dist >= 900) continue;  // undisclosed distance is unusable here
            seen.push_back({key.substr(5, tail - 5),
                            wrap_angle(pose.heading + bearing), dist});
        }

        Vec2 velocity =
            shape_ == Shape::Circle ? circle_velocity(pose, seen) : chain_velocity(pose, seen);
        set_pair(memory, "c_l", "c_r",
                 steer_to_point(pose, pose.position + velocity * dt_, max_speed_, wheel_base_,
                                dt_));
    }

    std::vector<std::string> provided_variables() const override { return {"c_l", "c_r"}; }

private:
    template <typename Sightings>
    Vec2 circle_velocity(const Pose& pose, const Sightings& seen) const {
        std::vector<PolarSighting> polar;
        for (const auto& s : seen) polar.push_back({s.bearing, s.dist});
        if (knn_ > 0 && int(polar.size()) > knn_) {
            std::sort(polar.begin(), polar.end(),
                      [](const PolarSighting& a, const PolarSighting& b) {
                          return a.second < b.second;
                      });
            polar.resize(std::size_t(knn_));
        }
        return circle_step(pose.position, polar, radius_, max_speed_);
    }

    template <typename Sightings>
    Vec2 chain_velocity(const Pose& pose, const Sightings& seen) const {
        Vec2 ab = anchor_b_ - anchor_a_;
        double len_sq = ab.norm_sq();
        if (len_sq < 1e-12) return {0, 0};

        // Chain order = order of projections onto AB, names as tie-break.
        struct Slot {
            double t;
            std::string name;
            Vec2 position;
        };
        std::vector<Slot> slots;
        slots.push_back({(pose.position - anchor_a_).dot(ab) / len_sq, name_, pose.position});
        for (const auto& s : seen) {
            Vec2 p = pose.position + dir(s.bearing) * s.dist;
            slots.push_back({(p - anchor_a_).dot(ab) / len_sq, s.name, p});
        }
        std::sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) {
            return a.t != b.t ? a.t < b.t : a.name < b.name;
        });
        std::size_t self = 0;
        while (slots[self].name != name_) ++self;
        Vec2 left = self == 0 ? anchor_a_ : slots[self - 1].position;
        Vec2 right = self + 1 == slots.size() ? anchor_b_ : slots[self + 1].position;
        return chain_step(pose.position, left, right, max_speed_);
    }

    Shape shape_;
    std::string name_;
    double max_speed_;
    double wheel_base_;
    double dt_;
    double radius_;
    int knn_;
    Vec2 anchor_a_;
    Vec2 anchor_b_;
};

}  // namespace

std::optional<StrategyInfo> strategy_info(const std::string& name) {
    auto vars = [](std::vector<std::string> v) {
        StrategyInfo info;
        info.variables = std::move(v);
        return info;
    };
    if (name == "chase") return vars({"steer_l", "steer_r", "caught"});
    if (name == "evade") return vars({"threat", "flee_l", "flee_r", "wander_l", "wander_r"});
    if (name == "wall_follow") return vars({"w_l", "w_r", "turn", "clear"});
    if (name == "mushroom_random" || name == "mushroom_return") {
        return vars({"s_l", "s_r", "f_l", "f_r", "h_l", "h_r", "at_home"});
    }
    if (name == "circle" || name == "chain") return vars({"c_l", "c_r"});
    return std::nullopt;
}

std::unique_ptr<Policy> make_strategy(const AgentSpec& spec, const AgentContext& ctx) {
    const std::string& name = spec.strategy;
    if (name.empty() || name == "none") return nullptr;
    if (name == "chase") return std::make_unique<ChasePolicy>(spec, ctx);
    if (name == "evade") return std::make_unique<EvadePolicy>(spec, ctx);
    if (name == "wall_follow") return std::make_unique<WallFollowPolicy>(spec, ctx);
    if (name == "mushroom_random") return std::make_unique<ForagePolicy>(spec, ctx, false);
    if (name == "mushroom_return") return std::make_unique<ForagePolicy>(spec, ctx, true);
    if (name == "circle") {
        return std::make_unique<FormationPolicy>(spec, ctx, FormationPolicy::Shape::Circle);
    }
    if (name == "chain") {
        return std::make_unique<FormationPolicy>(spec, ctx, FormationPolicy::Shape::Chain);
    }
    throw EngineError("unknown strategy '" + name + "'");
}

}  // namespace jade::scenarios
