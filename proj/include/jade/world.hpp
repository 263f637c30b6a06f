#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jade/vec2.hpp"

namespace jade {

/// Identity of a thing a ray or a disc can touch.
struct ObjectRef {
    enum class Kind { Wall, Obstacle, Agent };
    Kind kind = Kind::Wall;
    int index = -1;  // obstacle index or agent id; -1 for walls

    constexpr bool operator==(const ObjectRef& r) const = default;
};

/// Convex polygon obstacle, vertices CCW.
struct Polygon {
    std::vector<Vec2> vertices;

    double area() const;        // signed; positive for CCW
    bool convex_ccw() const;    // >= 3 vertices, strictly positive area, convex
    bool contains(const Vec2& p) const;
};

/// Brightness field sampled on a uniform grid covering the arena exactly.
/// Row 0 is the bottom row (y near 0), column 0 the left column.
struct FloorGrid {
    int rows = 1;
    int cols = 1;
    std::vector<double> values{1.0};  // row-major, each in [0,1]

    double at(int row, int col) const { return values[std::size_t(row) * cols + col]; }
};

struct HomeZone {
    std::string owner;
    Vec2 origin;  // lower-left corner
    double width = 0;
    double height = 0;

    bool contains(const Vec2& p) const {
        return p.x >= origin.x && p.x <= origin.x + width && p.y >= origin.y &&
               p.y <= origin.y + height;
    }
    Vec2 center() const { return origin + Vec2(width / 2, height / 2); }
};

/// A collectible. Exactly one status at a time; `position` is meaningful only
/// while the resource lies in the field or in a home.
struct Resource {
    enum class Status { InField, Carried, Stored };
    int id = 0;
    Vec2 position;
    Status status = Status::InField;
    int carrier = -1;          // agent id while Carried
    std::string store_owner;   // home owner name while Stored
};

/// Static arena description.
struct WorldMap {
    double width = 0;
    double height = 0;
    std::vector<Polygon> obstacles;
    FloorGrid floor;
    std::vector<HomeZone> homes;
    std::vector<Resource> resources;

    bool in_bounds(const Vec2& p) const {
        return p.x >= 0 && p.x <= width && p.y >= 0 && p.y <= height;
    }
};

/// Deepest overlap found by a collision query. `normal` points away from the
/// touched object, into the agent body.
struct Contact {
    Vec2 point;
    Vec2 normal;
    ObjectRef other;
    double depth = 0;
};

/// Minimal body view the geometry queries need from an agent.
struct Body {
    int id = -1;
    Vec2 center;
    double radius = 0;
};

/// Penetration depths at or below this are treated as "not touching".
constexpr double kContactEpsilon = 1e-9;
/// move_with_collision stops within this distance of first contact.
constexpr double kBisectTolerance = 1e-6;

/// Exact differential-drive step: straight line when the wheel speeds agree
/// (|omega| < 1e-12), otherwise the closed-form arc about the instantaneous
/// center. Heading comes back normalized. Non-finite input or a non-positive
/// wheel_base/dt is rejected with std::invalid_argument.
Pose integrate_unicycle(const Pose& pose, double v_left, double v_right, double wheel_base,
                        double dt);

/// Nearest hit along the ray within max_range, against arena walls, obstacle
/// edges, and agent discs (skipping agent `ignore_id`). Distance is measured
/// from `origin`.
std::optional<std::pair<double, ObjectRef>> ray_cast(const WorldMap& world, const Vec2& origin,
                                                     double angle, double max_range,
                                                     int ignore_id,
                                                     const std::vector<Body>& agents);

/// Deepest contact if the disc at `center` overlaps anything by more than
/// kContactEpsilon. Ties on depth resolve by object order: walls, then
/// obstacles by index, then agents by id.
std::optional<Contact> disc_penetration(const WorldMap& world, const Vec2& center, double radius,
                                        int self_id, const std::vector<Body>& agents);

struct MoveResult {
    Pose pose;
    std::optional<Contact> contact;
};

/// Advance one body one tick. The full unicycle step is taken when the swept
/// motion stays clear; otherwise the body stops at first contact, located by
/// bisection to kBisectTolerance, and the remaining motion is cancelled.
MoveResult move_with_collision(const WorldMap& world, const Body& body, const Pose& pose,
                               double v_left, double v_right, double wheel_base, double dt,
                               const std::vector<Body>& agents);

/// Brightness of the grid cell containing `point` (no interpolation). Points
/// on a cell boundary belong to the higher-index cell; the arena's outer edge
/// clamps to the last cell. Throws std::out_of_range outside the bounds.
double floor_brightness(const WorldMap& world, const Vec2& point);

}  // namespace jade
