#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jade/config.hpp"
#include "jade/engine.hpp"

/// The bundled experiments: chasing, maze escape, mushroom picking, and the
/// two formation games. Each one is a strategy (the policy layer), a machine
/// document under assets/csm, and a hooks object wiring termination and
/// metrics into the engine.
namespace jade::scenarios {

/// Strategy catalog for config validation; pass as the catalog argument of
/// load_config. Covers: chase, evade, wall_follow, mushroom_random,
/// mushroom_return, circle, chain.
std::optional<StrategyInfo> strategy_info(const std::string& name);

/// Policy factory for the catalog strategies; "none" yields null.
/// Throws EngineError for a name the catalog does not list.
std::unique_ptr<Policy> make_strategy(const AgentSpec& spec, const AgentContext& context);

/// Hooks for the run's <scenario> element: policy factory, setup, termination
/// predicate, and final metrics. An empty scenario name gives a free run.
ScenarioHooks hooks_for(const RunConfig& config);

// ---------------------------------------------------------------------------
// Formation rules. Both are pure: position in, commanded velocity out.

/// One neighbor as the scan discloses it: world-frame bearing and distance
/// from the observing agent.
using PolarSighting = std::pair<double, double>;

/// Velocity toward the regular-polygon arrangement: a radial term steering to
/// distance `target_radius` from the centroid of self plus known neighbors,
/// and a tangential term steering to the angular midpoint of the two
/// angularly adjacent neighbors. Fewer than 2 known neighbors holds position.
/// Output magnitude is clamped to max_speed.
Vec2 circle_step(const Vec2& self, const std::vector<PolarSighting>& known,
                 double target_radius, double max_speed);

/// Velocity toward the midpoint of the two chain neighbors (anchors stand in
/// at the ends), clamped to max_speed.
Vec2 chain_step(const Vec2& self, const Vec2& left, const Vec2& right, double max_speed);

/// stdev(distances to centroid)/R + stdev(consecutive angular gaps)/(2pi/n).
/// Dimensionless; coincident positions give +infinity.
double circle_error(const std::vector<Vec2>& positions, double target_radius);

/// max(perpendicular deviation)/|AB| + stdev(consecutive spacings along AB,
/// anchors included)/(|AB|/(n+1)). Dimensionless; a == b gives +infinity.
double chain_error(const std::vector<Vec2>& positions, const Vec2& a, const Vec2& b);

// ---------------------------------------------------------------------------
// Steering. Both return (v_left, v_right) wheel commands.

/// Rotate-then-advance controller. Turns in place until the heading error
/// falls below 1e-9 (never overshooting), then drives straight, never past
/// the target. Targets closer than 1e-9 command a full stop, so a reached
/// target is an exact fixed point.
std::pair<double, double> steer_to_point(const Pose& pose, const Vec2& target,
                                         double max_speed, double wheel_base, double dt);

/// Smooth pursuit arc: forward speed scaled down as the heading error grows,
/// turn rate proportional to it. `bearing` is relative to the agent heading.
std::pair<double, double> steer_arc(double bearing, double cruise, double max_speed,
                                    double wheel_base);

// ---------------------------------------------------------------------------
// Maze generation for the wall-following experiment.

struct MazeSpec {
    int rows = 0;
    int cols = 0;
    double pitch = 1.0;      // cell-to-cell spacing
    double thickness = 0.2;  // wall thickness; cell interior = pitch - thickness

    /// Carved passages between adjacent cells, row-major; open_right[r*cols+c]
    /// is the wall between (r,c) and (r,c+1), open_up between (r,c), (r+1,c).
    std::vector<std::uint8_t> open_right;
    std::vector<std::uint8_t> open_up;

    struct Rect {
        Vec2 origin;
        double width = 0;
        double height = 0;
    };
    std::vector<Rect> walls;  // merged collinear runs, border included

    Vec2 start;        // center of cell (0,0)
    Rect exit_region;  // interior of the far corner cell

    double width() const { return cols * pitch + thickness; }
    double height() const { return rows * pitch + thickness; }
};

/// Perfect maze via recursive backtracking: every cell reachable, no loops
/// (carved passages always number rows*cols - 1).
MazeSpec generate_maze(int rows, int cols, std::uint64_t seed);

/// Full run config for a maze: the walls as obstacles, one wall-following
/// agent starting at cell (0,0), exit in the far corner. The machine document
/// is referenced as "wall_follow.csm" relative to the config base directory.
std::string maze_config_xml(const MazeSpec& maze, long long max_ticks);

// ---------------------------------------------------------------------------
// Generated formation configs: n agents at seeded random non-overlapping
// starts in a 12x12 arena. Machine document referenced as "formation.csm".

std::string circle_config_xml(int agents, double target_radius, std::uint64_t seed,
                              long long max_ticks);
std::string chain_config_xml(int agents, std::uint64_t seed, long long max_ticks);

}  // namespace jade::scenarios
