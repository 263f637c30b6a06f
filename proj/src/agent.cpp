#include "jade/agent.hpp"

#include <algorithm>

namespace jade {

EventSet interpret(const std::map<std::string, double>& channels,
                   const std::vector<ThresholdRule>& rules,
                   const std::vector<InboxMessage>& inbox) {
    EventSet events;
    events.push_back({kTickEvent, {}, EventOrigin::Sensor});
    for (const auto& rule : rules) {
        auto it = channels.find(rule.reading);
        if (it == channels.end()) continue;
        double v = it->second;
        bool hit = (rule.below && v < *rule.below) || (rule.above && v > *rule.above);
        if (!hit) continue;
        EventInstance e{rule.event, {}, EventOrigin::Sensor};
        if (rule.pass_value) e.payload = v;
        events.push_back(std::move(e));
    }
    for (const auto& msg : inbox)
        events.push_back({kMsgEvent, EventPayload{msg.payload}, EventOrigin::Message});
    return events;
}

std::optional<std::pair<double, double>> apply_reflexes(const EventSet& events,
                                                        const std::vector<ReflexRule>& reflexes) {
    const ReflexRule* best = nullptr;
    for (const auto& r : reflexes) {
        if (!find_event(events, r.trigger)) continue;
        if (!best || r.priority > best->priority) best = &r;
    }
    if (!best) return std::nullopt;
    return std::make_pair(best->v_left, best->v_right);
}

void deposit_readings(Memory& memory, const Readings& readings) {
    memory.set("pos_x", readings.pose.position.x);
    memory.set("pos_y", readings.pose.position.y);
    memory.set("heading", readings.pose.heading);
    memory.set("carrying", readings.carrying ? 1.0 : 0.0);
    for (const auto& [name, value] : readings.channels) memory.set(name, value);

    double nearest_dist = kNoReading;
    double nearest_bearing = 0;
    for (const auto& entry : readings.scan.entries) {
        memory.set("scan_" + entry.name + "_bearing", entry.bearing);
        memory.set("scan_" + entry.name + "_dist",
                   entry.distance ? *entry.distance : kNoReading);
        if (entry.distance && *entry.distance < nearest_dist) {
            nearest_dist = *entry.distance;
            nearest_bearing = entry.bearing;
        }
    }
    memory.set("nearest_dist", nearest_dist);
    memory.set("nearest_bearing", nearest_bearing);

    // Nearest visible resource; -1 when nothing is in sight.
    const ResourceSighting* best = nullptr;
    for (const auto& s : readings.sightings)
        if (!best || s.distance < best->distance) best = &s;
    memory.set("vis_id", best ? double(best->id) : -1.0);
    memory.set("vis_bearing", best ? best->bearing : 0.0);
    memory.set("vis_dist", best ? best->distance : kNoReading);
}

std::vector<std::string> reading_variable_names(const AgentSpec& spec,
                                                const std::vector<std::string>& other_agents) {
    std::vector<std::string> names{"pos_x",        "pos_y",    "heading", "carrying",
                                   "nearest_dist", "nearest_bearing",
                                   "vis_id",       "vis_bearing", "vis_dist"};
    if (spec.devices.floor_sensor) names.push_back("floor");
    if (spec.devices.odometry) {
        names.push_back("odo_l");
        names.push_back("odo_r");
    }
    for (const auto& t : spec.devices.touch) names.push_back("touch_" + t.name);
    for (const auto& p : spec.devices.proximity) names.push_back("prox_" + p.name);
    for (const auto& other : other_agents) {
        if (other == spec.name) continue;
        names.push_back("scan_" + other + "_bearing");
        names.push_back("scan_" + other + "_dist");
    }
    return names;
}

AgentRuntime::AgentRuntime(const AgentSpec& spec, std::unique_ptr<Policy> policy,
                           const AgentContext& context)
    : spec_(spec), memory_(spec.memory_capacity), policy_(std::move(policy)) {
    auto parsed = parse_csm(spec.csm_source);
    // Config loading validated the document; a failure here is a harness bug.
    if (has_errors(parsed.diags))
        throw CsmError("agent '" + spec.name + "': " + format_diagnostics(parsed.diags), 0, 0);
    machines_ = std::move(parsed.machines);
    for (auto& m : machines_) m.reset();
    for (const auto& [name, value] : spec.memory_init) memory_.set(name, value);
    if (!policy_) policy_ = std::make_unique<NullPolicy>();
    policy_->init(memory_, context);
}

AgentOutput AgentRuntime::step(long long tick, const Readings& readings,
                               const std::vector<InboxMessage>& inbox) {
    deposit_readings(memory_, readings);

    EventSet events = interpret(readings.channels, spec_.thresholds, inbox);
    // Machine emissions from the previous step surface now.
    for (auto& e : pending_emits_) events.push_back(std::move(e));
    pending_emits_.clear();

    EventSet injected;
    policy_->prestep(memory_, events, injected);
    for (auto& e : injected) {
        e.origin = EventOrigin::Strategy;
        events.push_back(std::move(e));
    }

    CsmStepResult step = csm_step(machines_, events, memory_);
    pending_emits_ = std::move(step.emitted);

    AgentOutput out;
    for (const auto& action : step.actions) {
        switch (action.kind) {
            case ActionKind::SetWheels:
                out.drive = {action.x, action.y};  // last writer wins
                break;
            case ActionKind::Send:
                out.messages.push_back({action.name, action.x});
                break;
            case ActionKind::Pick: {
                // Resolve to the nearest visible resource within reach; a
                // pick with nothing in reach dissolves.
                const ResourceSighting* best = nullptr;
                for (const auto& s : readings.sightings)
                    if (!best || s.distance < best->distance) best = &s;
                if (best && best->distance <= spec_.body_radius + kPickReach)
                    out.ops.push_back({ResourceOp::Kind::Pick, best->id});
                break;
            }
            case ActionKind::Drop:
                out.ops.push_back({ResourceOp::Kind::Drop, -1});
                break;
            case ActionKind::Assign:
            case ActionKind::Emit:
                break;  // already applied inside csm_step
        }
    }

    if (auto reflex = apply_reflexes(events, spec_.reflexes)) out.drive = reflex;

    for (const auto& e : events) memory_.record(tick, e.name);
    last_events_ = std::move(events);
    return out;
}

}  // namespace jade
