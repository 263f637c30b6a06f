#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jade/csm.hpp"
#include "jade/devices.hpp"
#include "jade/events.hpp"
#include "jade/memory.hpp"

namespace jade {

/// Sentinel deposited for optional readings with no value this tick (no
/// proximity hit, undisclosed scan distance). Guards can rely on the name
/// always existing; a `below` comparison simply never matches the sentinel.
constexpr double kNoReading = 1e30;

/// Extra reach beyond the body radius within which `pick` resolves.
constexpr double kPickReach = 0.1;

/// Interpretation-layer rule: compare one reading channel against a constant
/// and raise an event when it matches. Exactly one of `below`/`above` is set.
struct ThresholdRule {
    std::string reading;
    std::optional<double> below;
    std::optional<double> above;
    std::string event;
    bool pass_value = false;  // attach the reading as the event payload
};

/// Direct event -> drive response, bypassing the machines. Highest priority
/// wins; a reflex command overrides the operation layer this tick.
struct ReflexRule {
    std::string trigger;
    double v_left = 0;
    double v_right = 0;
    int priority = 0;
};

struct DeviceSuite {
    bool floor_sensor = false;
    bool odometry = false;
    double wheel_radius = 0.05;
    int ticks_per_rev = 100;
    std::vector<TouchSensor> touch;
    std::vector<ProximitySensor> proximity;
    std::optional<VisionSensor> vision;
};

/// Everything the server hands an agent at the start of its think phase.
/// `channels` is ordered so memory deposits are ordered too.
struct Readings {
    Pose pose;
    std::map<std::string, double> channels;
    ScanReport scan;
    std::vector<ResourceSighting> sightings;
    bool carrying = false;
};

struct InboxMessage {
    std::string from;
    double payload = 0;
};

struct OutgoingMessage {
    std::string destination;  // agent name, group name, or "broadcast"
    double payload = 0;
};

struct ResourceOp {
    enum class Kind { Pick, Drop };
    Kind kind = Kind::Pick;
    int resource_id = -1;  // resolved pick target; unused for Drop
};

struct AgentOutput {
    std::optional<std::pair<double, double>> drive;  // absent keeps the previous command
    std::vector<OutgoingMessage> messages;
    std::vector<ResourceOp> ops;
};

class Policy;

struct AgentSpec {
    std::string name;
    std::string color = "#808080";
    double body_radius = 0.25;
    Pose initial_pose;
    double wheel_base = 0.2;
    double max_speed = 1.0;
    double max_accel = 2.0;
    DeviceSuite devices;
    std::string csm_source;  // machine document text (already loaded)
    std::string strategy = "none";
    std::map<std::string, double> strategy_params;
    std::vector<ThresholdRule> thresholds;
    std::vector<ReflexRule> reflexes;
    std::map<std::string, double> memory_init;
    std::size_t memory_capacity = 64;
};

/// What a policy learns about its agent when the run starts.
struct AgentContext {
    std::string name;
    int id = -1;
    std::map<std::string, double> params;
    std::uint64_t rng_seed = 0;  // per-agent stream; derived from the run seed
    std::optional<Vec2> home_center;
    double tick_duration = 0.1;
    double near_threshold = 1.0;
    double max_speed = 1.0;
    double wheel_base = 0.2;
};

/// Strategy layer: a named scenario policy. Runs before the machines each
/// tick and talks to them through injected events and memory writes.
class Policy {
public:
    virtual ~Policy() = default;
    virtual void init(Memory&, const AgentContext&) {}
    /// May inject events (visible to the machines this same tick) and update
    /// memory. `events` already contains TICK, sensor and message events.
    virtual void prestep(Memory&, const EventSet& events, EventSet& inject) = 0;
    /// Names validate_csm should treat as producible / readable.
    virtual std::vector<std::string> provided_events() const { return {}; }
    virtual std::vector<std::string> provided_variables() const { return {}; }
};

/// Policy that does nothing; the default when a spec names no strategy.
class NullPolicy final : public Policy {
public:
    void prestep(Memory&, const EventSet&, EventSet&) override {}
};

/// Signal -> event conversion. One event per satisfied threshold rule, one
/// MSG event per inbox message (in inbox order), TICK always.
EventSet interpret(const std::map<std::string, double>& channels,
                   const std::vector<ThresholdRule>& rules,
                   const std::vector<InboxMessage>& inbox);

/// Highest-priority triggered reflex command, if any.
std::optional<std::pair<double, double>> apply_reflexes(const EventSet& events,
                                                        const std::vector<ReflexRule>& reflexes);

/// One agent's whole abstract part: interpretation rules, machines, strategy,
/// memory. The server owns the physical part (pose, drive, devices).
class AgentRuntime {
public:
    AgentRuntime(const AgentSpec& spec, std::unique_ptr<Policy> policy,
                 const AgentContext& context);

    /// Full layer pipeline for one tick. Deterministic given the inputs.
    AgentOutput step(long long tick, const Readings& readings,
                     const std::vector<InboxMessage>& inbox);

    const Memory& memory() const { return memory_; }
    Memory& memory() { return memory_; }
    const std::vector<CsmMachine>& machines() const { return machines_; }
    const AgentSpec& spec() const { return spec_; }
    /// Events the interpretation layer produced last step (for logging).
    const EventSet& last_events() const { return last_events_; }

private:
    AgentSpec spec_;
    std::vector<CsmMachine> machines_;
    Memory memory_;
    std::unique_ptr<Policy> policy_;
    EventSet pending_emits_;  // machine emissions, delivered next step
    EventSet last_events_;
};

/// Deposits pose, channel, scan, and sighting values into memory under the
/// documented names (pos_x, heading, touch_*, scan_<name>_bearing, ...).
void deposit_readings(Memory& memory, const Readings& readings);

/// The memory names deposit_readings will produce for this spec given the
/// other agents' names; the validation scope needs them up front.
std::vector<std::string> reading_variable_names(const AgentSpec& spec,
                                                const std::vector<std::string>& other_agents);

}  // namespace jade
