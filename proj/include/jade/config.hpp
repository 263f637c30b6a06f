#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jade/agent.hpp"
#include "jade/diagnostics.hpp"
#include "jade/world.hpp"

namespace jade {

/// Scenario binding from the config: a name plus numeric parameters.
struct ScenarioConfig {
    std::string name;  // empty = free run, no termination predicate
    std::map<std::string, double> params;
};

struct RunConfig {
    std::uint64_t seed = 0;
    double tick_duration = 0.1;
    long long max_ticks = 1;
    double near_threshold = 1.0;
    int checkpoint_every = 1;
    WorldMap world;
    std::vector<AgentSpec> agents;
    ScenarioConfig scenario;
};

struct ConfigResult {
    std::optional<RunConfig> config;  // present iff no errors
    Diagnostics diagnostics;
};

/// What a strategy contributes to an agent's machine scope. Lets config
/// validation know about events a policy injects and variables it writes
/// without this module depending on the policy implementations.
struct StrategyInfo {
    std::vector<std::string> events;
    std::vector<std::string> variables;
};

using StrategyCatalog = std::optional<StrategyInfo> (*)(const std::string& name);

/// Parses and fully validates a run document. `base_dir` resolves relative
/// csm file references; pass "" to forbid file references (inline only).
/// Without a catalog only the built-in strategy "none" is accepted.
ConfigResult load_config(const std::string& xml_text, const std::string& base_dir,
                         StrategyCatalog catalog = nullptr);
ConfigResult load_config_file(const std::string& path, StrategyCatalog catalog = nullptr);

/// Canonical text form: independent of attribute order and float spelling
/// in the source document. The digest identifies the world, agents, and
/// scenario; the seed is deliberately excluded so one config can be run
/// under many seeds against the same digest.
std::string canonical_config(const RunConfig& config);
std::uint64_t config_digest(const RunConfig& config);

/// Per-agent random stream, derived so other agents' draws never shift when
/// an agent is added or removed.
std::uint64_t agent_seed(std::uint64_t run_seed, int agent_id);

/// The context an agent runtime receives, assembled identically on the
/// server and on a remote client so both build the same agent.
AgentContext make_agent_context(const RunConfig& config, const AgentSpec& spec, int agent_id);

/// Valid agent/group/event name: [A-Za-z_][A-Za-z0-9_-]*
bool valid_name(const std::string& name);

}  // namespace jade
