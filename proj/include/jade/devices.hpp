#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jade/vec2.hpp"
#include "jade/world.hpp"

namespace jade {

// Differential drive with simulated inertia: commanded speeds are reached
// gradually, at most max_accel per unit time.
struct DriveState {
    double commanded_left = 0;
    double commanded_right = 0;
    double actual_left = 0;
    double actual_right = 0;
    double wheel_base = 0.2;
    double max_speed = 1.0;
    double max_accel = 2.0;

    // Clamps to [-max_speed, max_speed] on write.
    void command(double left, double right);
};

// Moves each actual wheel speed toward its commanded value by at most
// max_accel * dt; lands exactly on the command when within that bound.
DriveState apply_inertia(const DriveState& drive, double dt);

// Contact-direction switch. Reports true when a contact's bearing from the
// agent center falls inside [center_angle - half_width, center_angle + half_width]
// (relative to heading, closed interval).
struct TouchSensor {
    std::string name;
    double center_angle = 0;
    double half_width = kPi / 4;
};

bool read_touch(const TouchSensor& sensor, const Pose& pose,
                const std::optional<Contact>& contact);

// Distance-ranged obstacle feeler mounted on the body rim.
struct ProximitySensor {
    std::string name;
    double mount_angle = 0;
    double range = 1.0;
};

// Casts from the rim point at mount_angle along heading + mount_angle.
// Returns the distance from the body surface, absent beyond range.
std::optional<double> read_proximity(const ProximitySensor& sensor, const Pose& pose,
                                     double body_radius, int self_id, const WorldMap& world,
                                     const std::vector<Body>& agents);

// Wheel revolution counters. accum holds real rotations; reported counts are
// floor(accum * ticks_per_rev) and so only ever move in whole ticks.
struct OdometryState {
    double wheel_radius = 0.05;
    int ticks_per_rev = 100;
    double accum_left = 0;
    double accum_right = 0;
    long long reported_left = 0;
    long long reported_right = 0;
};

OdometryState read_odometry(const OdometryState& odo, double actual_left, double actual_right,
                            double dt);

// Directory scan result: every other registered agent with its bearing
// relative to own heading; distance disclosed only when the agent is near.
struct ScanEntry {
    std::string name;
    double bearing = 0;
    std::optional<double> distance;
};

struct ScanReport {
    std::vector<ScanEntry> entries;
};

struct ScanTarget {
    std::string name;
    Vec2 position;
};

// One entry per target except self (matched by name), sorted by name.
// Distance included iff true distance <= near_threshold (closed).
ScanReport scan_agents(const std::string& self_name, const Pose& self_pose,
                       const std::vector<ScanTarget>& targets, double near_threshold);

struct VisionSensor {
    double range = 2.0;
};

struct ResourceSighting {
    int id = 0;
    double bearing = 0;
    double distance = 0;
};

// Resources visible to this agent within vision range: everything lying in
// the field, plus resources stored in homes the agent does not own. A home
// hides its contents from its owner only; carried resources are hidden from
// everyone. Order follows world.resources.
std::vector<ResourceSighting> scan_resources(const std::string& self_name, const Pose& self_pose,
                                             const WorldMap& world, const VisionSensor& vision);

}  // namespace jade
