#include "jade/devices.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jade {

void DriveState::command(double left, double right) {
    commanded_left = std::clamp(left, -max_speed, max_speed);
    commanded_right = std::clamp(right, -max_speed, max_speed);
}

DriveState apply_inertia(const DriveState& drive, double dt) {
    if (dt <= 0) throw std::invalid_argument("apply_inertia: dt must be > 0");
    auto approach = [&](double actual, double commanded) {
        double step = drive.max_accel * dt;
        if (std::abs(commanded - actual) <= step) return commanded;
        return actual + (commanded > actual ? step : -step);
    };
    DriveState out = drive;
    out.actual_left = approach(drive.actual_left, drive.commanded_left);
    out.actual_right = approach(drive.actual_right, drive.commanded_right);
    return out;
}

bool read_touch(const TouchSensor& sensor, const Pose& pose,
                const std::optional<Contact>& contact) {
    if (!contact) return false;
    Vec2 rel = contact->point - pose.position;
    if (rel.norm_sq() < 1e-24) return true;  // contact at the very center touches everything
    double bearing = wrap_angle(std::atan2(rel.y, rel.x) - pose.heading);
    return std::abs(wrap_angle(bearing - sensor.center_angle)) <= sensor.half_width;
}

std::optional<double> read_proximity(const ProximitySensor& sensor, const Pose& pose,
                                     double body_radius, int self_id, const WorldMap& world,
                                     const std::vector<Body>& agents) {
    double angle = pose.heading + sensor.mount_angle;
    Vec2 origin = pose.position + dir(angle) * body_radius;
    auto hit = ray_cast(world, origin, angle, sensor.range, self_id, agents);
    if (!hit) return std::nullopt;
    return hit->first;
}

OdometryState read_odometry(const OdometryState& odo, double actual_left, double actual_right,
                            double dt) {
    if (odo.wheel_radius <= 0) throw std::invalid_argument("read_odometry: wheel_radius <= 0");
    if (dt <= 0) throw std::invalid_argument("read_odometry: dt must be > 0");
    OdometryState out = odo;
    out.accum_left += actual_left * dt / (kTwoPi * odo.wheel_radius);
    out.accum_right += actual_right * dt / (kTwoPi * odo.wheel_radius);
    out.reported_left = (long long)std::floor(out.accum_left * odo.ticks_per_rev);
    out.reported_right = (long long)std::floor(out.accum_right * odo.ticks_per_rev);
    return out;
}

ScanReport scan_agents(const std::string& self_name, const Pose& self_pose,
                       const std::vector<ScanTarget>& targets, double near_threshold) {
    if (near_threshold < 0) throw std::invalid_argument("scan_agents: near_threshold < 0");
    ScanReport report;
    for (const auto& target : targets) {
        if (target.name == self_name) continue;
        Vec2 rel = target.position - self_pose.position;
        double bearing = wrap_angle(std::atan2(rel.y, rel.x) - self_pose.heading);
        ScanEntry entry{target.name, bearing, std::nullopt};
        double dist = rel.norm();
        if (dist <= near_threshold) entry.distance = dist;
        report.entries.push_back(std::move(entry));
    }
    std::sort(report.entries.begin(), report.entries.end(),
              [](const ScanEntry& a, const ScanEntry& b) { return a.name < b.name; });
    return report;
}

std::vector<ResourceSighting> scan_resources(const std::string& self_name, const Pose& self_pose,
                                             const WorldMap& world, const VisionSensor& vision) {
    std::vector<ResourceSighting> out;
    for (const auto& res : world.resources) {
        bool visible = false;
        if (res.status == Resource::Status::InField) {
            visible = true;
        } else if (res.status == Resource::Status::Stored) {
            visible = res.store_owner != self_name;
        }
        if (!visible) continue;
        Vec2 rel = res.position - self_pose.position;
        double dist = rel.norm();
        if (dist > vision.range) continue;
        double bearing = wrap_angle(std::atan2(rel.y, rel.x) - self_pose.heading);
        out.push_back({res.id, bearing, dist});
    }
    return out;
}

}  // namespace jade
