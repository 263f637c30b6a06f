#include "jade/engine.hpp"

#include <algorithm>

#include "jade/checksum.hpp"
#include "jade/wire.hpp"

namespace jade {

namespace {

// A mover stops a hair short of what it hit, so "in contact" must absorb the
// stop resolution. Kept well under any meaningful clearance.
constexpr double kTouchContactGap = 1e-5;

const char* origin_word(EventOrigin origin) {
    switch (origin) {
        case EventOrigin::Sensor: return "sensor";
        case EventOrigin::Machine: return "machine";
        case EventOrigin::Message: return "message";
        case EventOrigin::Strategy: return "strategy";
    }
    return "sensor";
}

std::string event_payload_text(const EventInstance& event) {
    std::string out = event.name;
    out += ' ';
    out += origin_word(event.origin);
    if (std::holds_alternative<double>(event.payload)) {
        out += " num ";
        out += format_double(std::get<double>(event.payload));
    } else if (std::holds_alternative<Vec2>(event.payload)) {
        const Vec2& v = std::get<Vec2>(event.payload);
        out += " vec ";
        out += format_double(v.x);
        out += ' ';
        out += format_double(v.y);
    }
    return out;
}

}  // namespace

std::string accept_remote_peer(Engine& engine, int connection_fd) {
    auto fail = [connection_fd]() {
        wire::close_fd(connection_fd);
        return std::string();
    };
    auto frame = wire::recv_frame(connection_fd);
    if (!frame || frame->kind != wire::FrameKind::Register) return fail();
    wire::ByteReader reader(frame->body);
    std::string name = reader.str();
    if (!reader.ok() || !reader.at_end()) return fail();
    auto it = engine.directory().names.find(name);
    if (it == engine.directory().names.end()) return fail();

    wire::ByteWriter reply;
    reply.u32(static_cast<std::uint32_t>(it->second));
    reply.u64(engine.run_seed());
    if (!wire::send_frame(connection_fd, wire::FrameKind::Registered, reply.bytes()))
        return fail();
    engine.attach_remote(name, connection_fd);
    return name;
}

Delivery route_messages(const std::vector<std::pair<int, OutgoingMessage>>& outbox,
                        const Directory& directory) {
    Delivery delivery;
    for (const auto& [sender, message] : outbox) {
        const std::string* sender_name = directory.name_of(sender);
        std::string from = sender_name ? *sender_name : "?";
        InboxMessage inbox_msg{from, message.payload};

        if (message.destination == "broadcast") {
            for (const auto& [name, id] : directory.names) {
                if (id != sender) delivery.inboxes[id].push_back(inbox_msg);
            }
            continue;
        }
        auto named = directory.names.find(message.destination);
        if (named != directory.names.end()) {
            delivery.inboxes[named->second].push_back(inbox_msg);
            continue;
        }
        auto group = directory.groups.find(message.destination);
        if (group != directory.groups.end()) {
            for (int member : group->second) {
                if (member != sender) delivery.inboxes[member].push_back(inbox_msg);
            }
            continue;
        }
        delivery.warnings.emplace_back(
            sender, "message from '" + from + "' to unknown destination '" +
                        message.destination + "' dropped");
    }
    return delivery;
}

Engine::Engine(const RunConfig& config, Mode mode, ScenarioHooks hooks)
    : config_(config),
      mode_(mode),
      hooks_(std::move(hooks)),
      world_(config.world),
      log_(LogHeader{1, config.seed, config_digest(config)}) {
    for (const AgentSpec& spec : config_.agents) register_agent(spec);
    if (hooks_.setup) hooks_.setup(*this);
}

Engine::~Engine() {
    for (Peer& peer : peers_) {
        if (peer.remote_fd >= 0) {
            wire::send_frame(peer.remote_fd, wire::FrameKind::Disconnect, {});
            wire::close_fd(peer.remote_fd);
            peer.remote_fd = -1;
        }
    }
}

void Engine::require_online(const char* what) const {
    if (mode_ != Mode::Online)
        throw EngineError(std::string(what) + " requires online mode");
}

int Engine::register_agent(const AgentSpec& spec) {
    // Offline engines may build their peer set before the first tick (replay
    // needs the same placement); only online ones may grow it mid-run.
    if (mode_ != Mode::Online && tick_ != 0)
        throw EngineError("register_agent requires online mode");
    if (spec.name == "broadcast" || !valid_name(spec.name))
        throw EngineError("agent name '" + spec.name + "' is reserved or invalid");
    if (directory_.names.count(spec.name))
        throw EngineError("agent name '" + spec.name + "' already registered");
    if (directory_.groups.count(spec.name))
        throw EngineError("agent name '" + spec.name + "' collides with a group");

    int id = static_cast<int>(peers_.size());
    std::vector<Body> placed = bodies();
    auto contact =
        disc_penetration(world_, spec.initial_pose.position, spec.body_radius, id, placed);
    if (contact) throw EngineError("agent '" + spec.name + "' placement collides");

    Peer peer;
    peer.id = id;
    peer.spec = spec;
    peer.pose = spec.initial_pose;
    peer.drive.wheel_base = spec.wheel_base;
    peer.drive.max_speed = spec.max_speed;
    peer.drive.max_accel = spec.max_accel;
    peer.odometry.wheel_radius = spec.devices.wheel_radius;
    peer.odometry.ticks_per_rev = spec.devices.ticks_per_rev;
    peer.registered_at = tick_;

    if (mode_ == Mode::Online) {
        AgentContext ctx = make_agent_context(config_, spec, id);
        std::unique_ptr<Policy> policy;
        if (hooks_.make_policy) policy = hooks_.make_policy(spec, ctx);
        peer.runtime = std::make_unique<AgentRuntime>(spec, std::move(policy), ctx);
    }

    directory_.names[spec.name] = id;
    peers_.push_back(std::move(peer));
    return id;
}

void Engine::attach_remote(const std::string& name, int fd) {
    require_online("attach_remote");
    auto it = directory_.names.find(name);
    if (it == directory_.names.end())
        throw EngineError("attach_remote: unknown agent '" + name + "'");
    Peer& peer = peers_[static_cast<std::size_t>(it->second)];
    peer.runtime.reset();
    peer.remote_fd = fd;
    peer.detached = false;
    wire::set_recv_timeout(fd, 5000);
}

int Engine::add_resource(const Vec2& position) {
    if (tick_ != 0) throw EngineError("resources can only be added before the first tick");
    if (!world_.in_bounds(position)) throw EngineError("resource outside the world");
    Resource res;
    res.id = static_cast<int>(world_.resources.size());
    res.position = position;
    res.status = Resource::Status::InField;
    world_.resources.push_back(res);
    return res.id;
}

bool Engine::manage_group(GroupCommand command, const std::string& group,
                          const std::string& agent) {
    require_online("manage_group");
    auto agent_it = directory_.names.find(agent);
    if (agent_it == directory_.names.end())
        throw EngineError("manage_group: unknown agent '" + agent + "'");
    int id = agent_it->second;

    auto refuse = [&](const std::string& text) {
        log_.append({tick_, RecordKind::Wrn, id, text});
        return false;
    };

    if (group == "broadcast" || !valid_name(group))
        return refuse("group name '" + group + "' is reserved or invalid");
    if (directory_.names.count(group))
        return refuse("group name '" + group + "' collides with an agent");

    switch (command) {
        case GroupCommand::Create:
            directory_.groups[group];
            return true;
        case GroupCommand::Join:
            directory_.groups[group].insert(id);
            return true;
        case GroupCommand::Leave: {
            auto it = directory_.groups.find(group);
            if (it == directory_.groups.end() || !it->second.erase(id))
                return refuse("agent '" + agent + "' left group '" + group +
                              "' it was not a member of");
            return true;
        }
        case GroupCommand::Dissolve: {
            if (!directory_.groups.erase(group))
                return refuse("dissolve of unknown group '" + group + "'");
            return true;
        }
    }
    return false;
}

const Peer* Engine::peer_named(const std::string& name) const {
    auto it = directory_.names.find(name);
    if (it == directory_.names.end()) return nullptr;
    return &peers_[static_cast<std::size_t>(it->second)];
}

std::vector<Body> Engine::bodies() const {
    std::vector<Body> out;
    out.reserve(peers_.size());
    for (const Peer& peer : peers_) {
        out.push_back({peer.id, peer.pose.position, peer.spec.body_radius});
    }
    return out;
}

Readings Engine::compute_readings(Peer& peer, const std::vector<Body>& all_bodies) {
    const double dt = config_.tick_duration;
    Readings readings;
    readings.pose = peer.pose;

    const DeviceSuite& devices = peer.spec.devices;
    if (devices.floor_sensor && !world_.floor.values.empty())
        readings.channels["floor"] = floor_brightness(world_, peer.pose.position);
    if (devices.odometry) {
        peer.odometry =
            read_odometry(peer.odometry, peer.drive.actual_left, peer.drive.actual_right, dt);
        readings.channels["odo_l"] = static_cast<double>(peer.odometry.reported_left);
        readings.channels["odo_r"] = static_cast<double>(peer.odometry.reported_right);
    }
    for (const TouchSensor& sensor : devices.touch) {
        readings.channels["touch_" + sensor.name] =
            read_touch(sensor, peer.pose, peer.contact) ? 1.0 : 0.0;
    }
    for (const ProximitySensor& sensor : devices.proximity) {
        auto distance = read_proximity(sensor, peer.pose, peer.spec.body_radius, peer.id,
                                       world_, all_bodies);
        readings.channels["prox_" + sensor.name] = distance ? *distance : kNoReading;
    }

    std::vector<ScanTarget> targets;
    targets.reserve(peers_.size());
    for (const Peer& other : peers_) {
        if (other.id != peer.id) targets.push_back({other.spec.name, other.pose.position});
    }
    readings.scan = scan_agents(peer.spec.name, peer.pose, targets, config_.near_threshold);

    if (devices.vision)
        readings.sightings =
            scan_resources(peer.spec.name, peer.pose, world_, *devices.vision);

    for (const Resource& res : world_.resources) {
        if (res.status == Resource::Status::Carried && res.carrier == peer.id) {
            readings.carrying = true;
            break;
        }
    }
    return readings;
}

void Engine::warn(std::vector<PendingRecord>& records, int agent, const std::string& text) {
    records.push_back({agent, {tick_, RecordKind::Wrn, agent, text}});
}

void Engine::think(Peer& peer, const Readings& readings,
                   const std::vector<InboxMessage>& inbox,
                   std::vector<PendingRecord>& records) {
    AgentOutput output;
    EventSet events;
    if (peer.runtime) {
        output = peer.runtime->step(tick_, readings, inbox);
        events = peer.runtime->last_events();
    } else if (peer.remote_fd >= 0 && !peer.detached) {
        wire::ByteWriter w;
        w.i64(tick_);
        wire::encode_readings(w, readings);
        wire::encode_inbox(w, inbox);
        bool ok = wire::send_frame(peer.remote_fd, wire::FrameKind::TickInputs, w.bytes());
        if (ok) {
            auto frame = wire::recv_frame(peer.remote_fd);
            ok = frame && frame->kind == wire::FrameKind::TickOutputs;
            if (ok) {
                wire::ByteReader r(frame->body);
                long long tick = r.i64();
                ok = tick == tick_ && wire::decode_output(r, output) &&
                     wire::decode_events(r, events) && r.at_end();
            }
        }
        if (!ok) {
            peer.detached = true;
            wire::close_fd(peer.remote_fd);
            peer.remote_fd = -1;
            output = AgentOutput{};
            events.clear();
            warn(records, peer.id,
                 "remote agent '" + peer.spec.name + "' detached; repeating last command");
        }
    }
    // A detached peer produces an empty output: the previous wheel command
    // stands and nothing else happens.

    for (const EventInstance& event : events) {
        if (event.name == kTickEvent) continue;  // implicit every tick
        records.push_back(
            {peer.id, {tick_, RecordKind::Evt, peer.id, event_payload_text(event)}});
    }
    if (output.drive) {
        peer.drive.command(output.drive->first, output.drive->second);
        records.push_back({peer.id,
                           {tick_, RecordKind::Cmd, peer.id,
                            format_double(peer.drive.commanded_left) + ' ' +
                                format_double(peer.drive.commanded_right)}});
    }
    for (const OutgoingMessage& message : output.messages) {
        outbox_.emplace_back(peer.id, message);
        records.push_back({peer.id,
                           {tick_, RecordKind::Msg, peer.id,
                            message.destination + ' ' + format_double(message.payload)}});
    }
    peer.last_output = std::move(output);
    peer.last_events = std::move(events);
}

void Engine::apply_ops(Peer& peer, std::vector<PendingRecord>& records) {
    for (const ResourceOp& op : peer.last_output.ops) {
        if (op.kind == ResourceOp::Kind::Pick) {
            if (op.resource_id < 0 ||
                op.resource_id >= static_cast<int>(world_.resources.size())) {
                warn(records, peer.id, "pick of unknown resource " +
                                           std::to_string(op.resource_id));
                continue;
            }
            Resource& res = world_.resources[static_cast<std::size_t>(op.resource_id)];
            bool carrying = false;
            for (const Resource& other : world_.resources) {
                if (other.status == Resource::Status::Carried && other.carrier == peer.id)
                    carrying = true;
            }
            if (carrying) {
                warn(records, peer.id, "pick while already carrying");
                continue;
            }
            if (res.status == Resource::Status::Carried) {
                warn(records, peer.id,
                     "resource " + std::to_string(res.id) + " already carried");
                continue;
            }
            if (res.status == Resource::Status::Stored &&
                res.store_owner == peer.spec.name) {
                warn(records, peer.id, "cannot pick from own store");
                continue;
            }
            double reach = peer.spec.body_radius + kPickReach + kContactEpsilon;
            if (distance(peer.pose.position, res.position) > reach) {
                warn(records, peer.id,
                     "resource " + std::to_string(res.id) + " out of reach");
                continue;
            }
            if (res.status == Resource::Status::Stored)
                thefts_.push_back({tick_, peer.id, res.id, res.store_owner});
            res.status = Resource::Status::Carried;
            res.carrier = peer.id;
            res.store_owner.clear();
            records.push_back(
                {peer.id, {tick_, RecordKind::Pck, peer.id, std::to_string(res.id)}});
        } else {
            Resource* carried = nullptr;
            for (Resource& res : world_.resources) {
                if (res.status == Resource::Status::Carried && res.carrier == peer.id)
                    carried = &res;
            }
            if (!carried) {
                warn(records, peer.id, "drop with nothing carried");
                continue;
            }
            carried->position = peer.pose.position;
            carried->carrier = -1;
            const HomeZone* zone = nullptr;
            for (const HomeZone& home : world_.homes) {
                if (home.contains(peer.pose.position)) {
                    zone = &home;
                    break;
                }
            }
            std::string payload = std::to_string(carried->id);
            if (zone) {
                carried->status = Resource::Status::Stored;
                carried->store_owner = zone->owner;
                payload += " home " + zone->owner;
            } else {
                carried->status = Resource::Status::InField;
                payload += " field " + format_double(carried->position.x) + ' ' +
                           format_double(carried->position.y);
            }
            records.push_back({peer.id, {tick_, RecordKind::Drp, peer.id, payload}});
        }
    }
}

std::vector<Body> Engine::advance_motion() {
    const double dt = config_.tick_duration;

    // (1) wheel inertia
    for (Peer& peer : peers_) peer.drive = apply_inertia(peer.drive, dt);

    // (2) motion with collision, ascending id
    std::vector<Body> all_bodies = bodies();
    for (Peer& peer : peers_) {
        MoveResult moved = move_with_collision(
            world_, all_bodies[static_cast<std::size_t>(peer.id)], peer.pose,
            peer.drive.actual_left, peer.drive.actual_right, peer.drive.wheel_base, dt,
            all_bodies);
        peer.pose = moved.pose;
        peer.contact = moved.contact;
        all_bodies[static_cast<std::size_t>(peer.id)].center = peer.pose.position;
    }

    // Contact is symmetric: a peer someone else stopped against is touching
    // too, the same tick, even though its own move hit nothing.
    for (Peer& peer : peers_) {
        if (peer.contact) continue;
        const Body& self = all_bodies[static_cast<std::size_t>(peer.id)];
        const Body* nearest = nullptr;
        double nearest_gap = kTouchContactGap;
        for (const Body& other : all_bodies) {
            if (other.id == peer.id) continue;
            double gap = distance(self.center, other.center) - self.radius - other.radius;
            if (gap <= nearest_gap) {
                nearest_gap = gap;
                nearest = &other;
            }
        }
        if (nearest) {
            Vec2 to = nearest->center - self.center;
            Vec2 unit = to * (1.0 / to.norm());
            peer.contact = Contact{self.center + unit * self.radius, unit * -1.0,
                                   {ObjectRef::Kind::Agent, nearest->id}, 0};
        }
    }
    return all_bodies;
}

void Engine::tick() {
    require_online("tick");
    if (finished_) throw EngineError("run already finished");
    std::vector<PendingRecord> records;

    // (1)+(2) inertia and motion
    std::vector<Body> all_bodies = advance_motion();

    // (3) sensing against the settled snapshot
    std::vector<Readings> readings;
    readings.reserve(peers_.size());
    for (Peer& peer : peers_) readings.push_back(compute_readings(peer, all_bodies));

    // (4) deliver messages sent last tick
    Delivery delivery = route_messages(outbox_, directory_);
    outbox_.clear();
    for (const auto& [sender, text] : delivery.warnings) warn(records, sender, text);

    // (5) think, ascending id
    for (Peer& peer : peers_) {
        static const std::vector<InboxMessage> kEmpty;
        auto it = delivery.inboxes.find(peer.id);
        think(peer, readings[static_cast<std::size_t>(peer.id)],
              it == delivery.inboxes.end() ? kEmpty : it->second, records);
    }

    // (6) resource ops, ascending id
    for (Peer& peer : peers_) apply_ops(peer, records);

    // (7) records: checkpoint first (it carries end-of-tick state), then
    // agent records grouped by ascending id, phases in order within each.
    if ((tick_ + 1) % config_.checkpoint_every == 0) {
        log_.append({tick_, RecordKind::Chk, -1, format_hex64(state_digest())});
    }
    std::stable_sort(records.begin(), records.end(),
                     [](const PendingRecord& a, const PendingRecord& b) {
                         return a.agent < b.agent;
                     });
    for (const PendingRecord& pending : records) log_.append(pending.record);

    ++tick_;
}

RunReport Engine::run() {
    require_online("run");
    if (finished_) throw EngineError("run already finished");
    std::string reason = "max_ticks";
    while (tick_ < config_.max_ticks) {
        tick();
        if (hooks_.on_tick) hooks_.on_tick(*this);
        if (hooks_.terminated && hooks_.terminated(*this)) {
            reason = "scenario";
            break;
        }
    }

    RunReport report;
    report.ticks = tick_;
    report.reason = reason;
    if (hooks_.finish) hooks_.finish(*this, report.metrics);

    std::string payload = "ticks " + std::to_string(tick_) + " reason " + reason;
    for (const auto& [name, value] : report.metrics) {
        payload += ' ' + name + ' ' + format_double(value);
    }
    log_.append({tick_, RecordKind::End, -1, payload});
    finished_ = true;

    for (Peer& peer : peers_) {
        if (peer.remote_fd >= 0) {
            wire::send_frame(peer.remote_fd, wire::FrameKind::Disconnect, {});
            wire::close_fd(peer.remote_fd);
            peer.remote_fd = -1;
        }
    }
    return report;
}

std::uint64_t Engine::state_digest() const {
    std::vector<KinState> view;
    view.reserve(peers_.size());
    for (const Peer& peer : peers_) {
        view.push_back({peer.pose, peer.drive, peer.spec.body_radius});
    }
    return digest_of(view, world_.resources);
}

std::uint64_t Engine::digest_of(const std::vector<KinState>& peers,
                                const std::vector<Resource>& resources) {
    Fnv1a64 hash;
    hash.add_u64(peers.size());
    for (const KinState& peer : peers) {
        hash.add_fixed(peer.pose.position.x);
        hash.add_fixed(peer.pose.position.y);
        hash.add_fixed(peer.pose.heading);
        hash.add_fixed(peer.drive.actual_left);
        hash.add_fixed(peer.drive.actual_right);
        hash.add_fixed(peer.drive.commanded_left);
        hash.add_fixed(peer.drive.commanded_right);
    }
    hash.add_u64(resources.size());
    for (const Resource& res : resources) {
        hash.add_u64(static_cast<std::uint64_t>(res.status));
        switch (res.status) {
            case Resource::Status::InField:
                hash.add_fixed(res.position.x);
                hash.add_fixed(res.position.y);
                break;
            case Resource::Status::Carried:
                hash.add_u64(static_cast<std::uint64_t>(res.carrier));
                break;
            case Resource::Status::Stored:
                hash.add_fixed(res.position.x);
                hash.add_fixed(res.position.y);
                hash.add_string(res.store_owner);
                break;
        }
    }
    return hash.value();
}

void Engine::resource_counts(int& in_field, int& carried, int& stored) const {
    in_field = carried = stored = 0;
    for (const Resource& res : world_.resources) {
        switch (res.status) {
            case Resource::Status::InField: ++in_field; break;
            case Resource::Status::Carried: ++carried; break;
            case Resource::Status::Stored: ++stored; break;
        }
    }
}

}  // namespace jade
