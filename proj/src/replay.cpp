#include "jade/engine.hpp"

namespace jade {

namespace {

std::optional<std::pair<double, double>> parse_command(const std::string& payload) {
    auto fields = split_fields(payload);
    if (fields.size() != 2) return std::nullopt;
    auto left = parse_double(fields[0]);
    auto right = parse_double(fields[1]);
    if (!left || !right) return std::nullopt;
    return std::pair{*left, *right};
}

}  // namespace

ReplayReport Engine::replay_core(
    const LogParseResult& log,
    const std::function<void(long long, const std::vector<KinState>&,
                             const std::vector<Resource>&)>& observe) const {
    if (tick_ != 0) throw EngineError("replay requires a fresh engine");

    ReplayReport report;
    if (!log.header) {
        report.detail = "log has no readable header";
        return report;
    }
    if (log.header->config_digest != config_digest(config_)) {
        report.detail = "config digest mismatch: log was produced by a different config";
        return report;
    }
    if (log.header->seed != config_.seed) {
        report.detail = "seed mismatch: log header says seed " +
                        std::to_string(log.header->seed);
        return report;
    }

    std::vector<KinState> state;
    state.reserve(peers_.size());
    for (const Peer& peer : peers_) {
        state.push_back({peer.pose, peer.drive, peer.spec.body_radius});
    }
    std::vector<Resource> resources = world_.resources;

    auto diverged = [&](long long tick, const std::string& why) {
        report.verdict = ReplayVerdict::Diverged;
        report.tick = tick;
        report.detail = why;
        return report;
    };

    // A complete log executed exactly END.tick ticks. An incomplete one has
    // a suspect final block (its tail may be missing), so only ticks before
    // it are verifiable. Both rules reduce to the last record's tick.
    const auto& records = log.records;
    long long horizon = records.empty() ? 0 : records.back().tick;

    const double dt = config_.tick_duration;
    std::size_t idx = 0;
    long long last_verified = -1;

    for (long long t = 0; t < horizon; ++t) {
        // Motion, exactly as the live tick runs it.
        for (KinState& peer : state) peer.drive = apply_inertia(peer.drive, dt);
        std::vector<Body> all_bodies;
        all_bodies.reserve(state.size());
        for (std::size_t i = 0; i < state.size(); ++i) {
            all_bodies.push_back({static_cast<int>(i), state[i].pose.position,
                                  state[i].radius});
        }
        for (std::size_t i = 0; i < state.size(); ++i) {
            KinState& peer = state[i];
            MoveResult moved = move_with_collision(
                world_, all_bodies[i], peer.pose, peer.drive.actual_left,
                peer.drive.actual_right, peer.drive.wheel_base, dt, all_bodies);
            peer.pose = moved.pose;
            all_bodies[i].center = peer.pose.position;
        }

        // The checkpoint heads its block but covers end-of-tick state, so
        // remember it and compare after the block's records are applied.
        std::optional<std::uint64_t> expected;
        for (; idx < records.size() && records[idx].tick == t; ++idx) {
            const LogRecord& rec = records[idx];
            switch (rec.kind) {
                case RecordKind::Chk: {
                    auto value = parse_hex64(rec.payload);
                    if (!value) return diverged(t, "malformed checkpoint");
                    expected = *value;
                    break;
                }
                case RecordKind::Cmd: {
                    if (rec.agent < 0 || rec.agent >= static_cast<int>(state.size()))
                        return diverged(t, "command for unknown agent");
                    auto cmd = parse_command(rec.payload);
                    if (!cmd) return diverged(t, "malformed command");
                    state[static_cast<std::size_t>(rec.agent)].drive.command(cmd->first,
                                                                             cmd->second);
                    break;
                }
                case RecordKind::Pck: {
                    if (rec.agent < 0 || rec.agent >= static_cast<int>(state.size()))
                        return diverged(t, "pick by unknown agent");
                    auto fields = split_fields(rec.payload);
                    long long id = -1;
                    if (fields.size() == 1) {
                        auto v = parse_double(fields[0]);
                        if (v) id = static_cast<long long>(*v);
                    }
                    if (id < 0 || id >= static_cast<long long>(resources.size()))
                        return diverged(t, "pick of unknown resource");
                    Resource& res = resources[static_cast<std::size_t>(id)];
                    for (const Resource& other : resources) {
                        if (other.status == Resource::Status::Carried &&
                            other.carrier == rec.agent)
                            return diverged(t, "pick while already carrying");
                    }
                    if (res.status == Resource::Status::Carried)
                        return diverged(t, "pick of a carried resource");
                    const Peer& peer = peers_[static_cast<std::size_t>(rec.agent)];
                    if (res.status == Resource::Status::Stored &&
                        res.store_owner == peer.spec.name)
                        return diverged(t, "pick from own store");
                    const KinState& kin = state[static_cast<std::size_t>(rec.agent)];
                    double reach = kin.radius + kPickReach + kContactEpsilon;
                    if (distance(kin.pose.position, res.position) > reach)
                        return diverged(t, "pick out of reach");
                    res.status = Resource::Status::Carried;
                    res.carrier = rec.agent;
                    res.store_owner.clear();
                    break;
                }
                case RecordKind::Drp: {
                    if (rec.agent < 0 || rec.agent >= static_cast<int>(state.size()))
                        return diverged(t, "drop by unknown agent");
                    Resource* carried = nullptr;
                    for (Resource& res : resources) {
                        if (res.status == Resource::Status::Carried &&
                            res.carrier == rec.agent)
                            carried = &res;
                    }
                    if (!carried) return diverged(t, "drop with nothing carried");
                    auto fields = split_fields(rec.payload);
                    if (fields.size() < 2) return diverged(t, "malformed drop");
                    auto id = parse_double(fields[0]);
                    if (!id || static_cast<int>(*id) != carried->id)
                        return diverged(t, "drop names the wrong resource");
                    const Vec2 at = state[static_cast<std::size_t>(rec.agent)].pose.position;
                    if (fields[1] == "home" && fields.size() == 3) {
                        const HomeZone* zone = nullptr;
                        for (const HomeZone& home : world_.homes) {
                            if (home.contains(at)) {
                                zone = &home;
                                break;
                            }
                        }
                        if (!zone || zone->owner != fields[2])
                            return diverged(t, "drop does not match any home here");
                        carried->status = Resource::Status::Stored;
                        carried->store_owner = zone->owner;
                        carried->position = at;
                        carried->carrier = -1;
                    } else if (fields[1] == "field" && fields.size() == 4) {
                        auto x = parse_double(fields[2]);
                        auto y = parse_double(fields[3]);
                        if (!x || !y || *x != at.x || *y != at.y)
                            return diverged(t, "drop position does not match the pose");
                        carried->status = Resource::Status::InField;
                        carried->store_owner.clear();
                        carried->position = at;
                        carried->carrier = -1;
                    } else {
                        return diverged(t, "malformed drop");
                    }
                    break;
                }
                case RecordKind::Evt:
                case RecordKind::Msg:
                case RecordKind::Wrn:
                case RecordKind::End:
                    break;  // carry no re-derivable world state
            }
        }

        if (expected) {
            if (digest_of(state, resources) != *expected)
                return diverged(t, "checkpoint mismatch");
            last_verified = t;
        }
        if (observe) observe(t, state, resources);
    }

    report.tick = last_verified;
    if (log.complete) {
        report.verdict = ReplayVerdict::Pass;
        report.detail = "all checkpoints matched";
    } else {
        report.verdict = ReplayVerdict::Partial;
        report.detail = last_verified < 0 ? "no verifiable ticks"
                                          : "log ends without a final record";
    }
    return report;
}

ReplayReport Engine::verify_log(const LogParseResult& log) const {
    return replay_core(log, nullptr);
}

}  // namespace jade
