#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "jade/agent.hpp"
#include "jade/config.hpp"
#include "jade/devices.hpp"
#include "jade/logfmt.hpp"
#include "jade/world.hpp"

namespace jade {

/// Online serves agents and advances the world; offline only loads state for
/// replay and rendering and refuses to mutate it.
enum class Mode { Online, Offline };

class EngineError : public std::runtime_error {
public:
    explicit EngineError(const std::string& message) : std::runtime_error(message) {}
};

/// Name service: agent names to dense ids, plus named groups.
/// Group names never collide with agent names.
struct Directory {
    std::map<std::string, int> names;
    std::map<std::string, std::set<int>> groups;

    const std::string* name_of(int id) const {
        for (const auto& [name, known] : names) {
            if (known == id) return &name;
        }
        return nullptr;
    }
};

enum class GroupCommand { Create, Join, Leave, Dissolve };

/// Routing result: per-recipient inboxes in (sender id, emission order),
/// plus a warning line per undeliverable message, tagged by sender id.
struct Delivery {
    std::map<int, std::vector<InboxMessage>> inboxes;
    std::vector<std::pair<int, std::string>> warnings;
};

/// Pure routing step. `outbox` must already be in (sender id, emission
/// order); "broadcast" goes to everyone except the sender, a group name to
/// its members except the sender, an agent name to that agent alone.
Delivery route_messages(const std::vector<std::pair<int, OutgoingMessage>>& outbox,
                        const Directory& directory);

class Engine;

/// Serves one REGISTER handshake on an accepted connection, answers with the
/// agent's id and the run seed, and attaches the peer. Returns the agent
/// name, or "" if the handshake failed (the fd is closed on failure).
std::string accept_remote_peer(Engine& engine, int connection_fd);

/// Server-side representative of one agent.
struct Peer {
    int id = -1;
    AgentSpec spec;
    Pose pose;
    DriveState drive;
    OdometryState odometry;
    std::optional<Contact> contact;  // from this tick's move phase
    std::unique_ptr<AgentRuntime> runtime;  // null while attached remotely
    int remote_fd = -1;
    bool detached = false;  // remote link lost; last command keeps repeating
    long long registered_at = 0;
    AgentOutput last_output;
    EventSet last_events;
};

struct TheftEvent {
    long long tick = 0;
    int thief = -1;
    int resource = -1;
    std::string victim;  // owner of the home the resource was taken from
};

struct RunReport {
    long long ticks = 0;
    std::string reason;  // "max_ticks" or "scenario"
    std::map<std::string, double> metrics;
};

enum class ReplayVerdict { Pass, Diverged, Partial, Refused };

struct ReplayReport {
    ReplayVerdict verdict = ReplayVerdict::Refused;
    long long tick = -1;  // Diverged: first bad tick; Partial: last verified tick
    std::string detail;
};

/// Overview renders the whole run into one document; Frames emits one
/// document per `every` ticks.
struct RenderOptions {
    enum class Mode { Overview, Frames } mode = Mode::Overview;
    long long every = 1;
    double scale = 60;  // pixels per world unit
};

class Engine;

/// Scenario integration points. All optional; a default-constructed hooks
/// object yields a free run (agents step until max_ticks).
struct ScenarioHooks {
    std::function<std::unique_ptr<Policy>(const AgentSpec&, const AgentContext&)> make_policy;
    std::function<void(Engine&)> setup;        // before the first tick
    std::function<void(const Engine&)> on_tick;
    std::function<bool(const Engine&)> terminated;
    std::function<void(const Engine&, std::map<std::string, double>&)> finish;
};

/// The Environment Map: world state, peers, directory, tick loop, log.
class Engine {
public:
    Engine(const RunConfig& config, Mode mode, ScenarioHooks hooks = {});
    ~Engine();

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    /// Places the agent and creates its peer; throws EngineError on duplicate
    /// or reserved names and on placement collisions. Allowed at any tick
    /// boundary online; offline engines may only populate before tick 0.
    int register_agent(const AgentSpec& spec);

    /// Replaces the in-process runtime with a wire attachment. The handshake
    /// (REGISTER in, REGISTERED out) must already have happened on `fd`.
    void attach_remote(const std::string& name, int fd);

    /// Adds a field resource before the first tick; returns its id.
    int add_resource(const Vec2& position);

    /// Group management; refusals (reserved or colliding names, leave of a
    /// non-member) log a warning and return false.
    bool manage_group(GroupCommand command, const std::string& group, const std::string& agent);

    /// One full tick: inertia, motion, sensing, delivery, thinking, resource
    /// ops, records. Online only.
    void tick();

    /// Ticks until max_ticks or the scenario predicate fires, then writes the
    /// END record and returns the report.
    RunReport run();

    Mode mode() const { return mode_; }
    long long tick_count() const { return tick_; }
    const RunConfig& config() const { return config_; }
    const WorldMap& world() const { return world_; }
    const std::vector<Peer>& peers() const { return peers_; }
    const Peer* peer_named(const std::string& name) const;
    const Directory& directory() const { return directory_; }
    const std::vector<TheftEvent>& thefts() const { return thefts_; }
    const LogWriter& log() const { return log_; }
    std::uint64_t run_seed() const { return config_.seed; }

    /// FNV-1a over fixed-point pose, wheel, and resource state; the value
    /// CHK records carry.
    std::uint64_t state_digest() const;

    /// Resource counts by status: {in_field, carried, stored}.
    void resource_counts(int& in_field, int& carried, int& stored) const;

    /// Re-simulates the log against this engine's initial state, feeding
    /// recorded commands and resource operations instead of stepping agents,
    /// and checks every checkpoint. Works on copied state: the engine itself
    /// never moves. Requires a fresh engine (no ticks executed).
    ReplayReport verify_log(const LogParseResult& log) const;

    /// Draws the log as SVG documents (world, trajectories, agents,
    /// resources), re-deriving poses the same way verify_log does.
    std::vector<std::string> render_trace(const LogParseResult& log,
                                          const RenderOptions& options) const;

private:
    struct PendingRecord {
        int agent;
        LogRecord record;
    };

    struct KinState {
        Pose pose;
        DriveState drive;
        double radius = 0;
    };

    static std::uint64_t digest_of(const std::vector<KinState>& peers,
                                   const std::vector<Resource>& resources);
    ReplayReport replay_core(
        const LogParseResult& log,
        const std::function<void(long long, const std::vector<KinState>&,
                                 const std::vector<Resource>&)>& observe) const;

    void require_online(const char* what) const;
    std::vector<Body> advance_motion();
    Readings compute_readings(Peer& peer, const std::vector<Body>& bodies);
    std::vector<Body> bodies() const;
    void think(Peer& peer, const Readings& readings, const std::vector<InboxMessage>& inbox,
               std::vector<PendingRecord>& records);
    void apply_ops(Peer& peer, std::vector<PendingRecord>& records);
    void warn(std::vector<PendingRecord>& records, int agent, const std::string& text);

    RunConfig config_;
    Mode mode_;
    ScenarioHooks hooks_;
    WorldMap world_;
    std::vector<Peer> peers_;
    Directory directory_;
    std::vector<std::pair<int, OutgoingMessage>> outbox_;  // sent this tick, due next
    std::vector<TheftEvent> thefts_;
    long long tick_ = 0;
    bool finished_ = false;
    LogWriter log_;
};

}  // namespace jade
