#include <algorithm>
#include <cmath>
#include <limits>

#include "jade/scenarios.hpp"

namespace jade::scenarios {

namespace {

double population_stdev(const std::vector<double>& xs) {
    if (xs.empty()) return 0;
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= double(xs.size());
    double acc = 0;
    for (double x : xs) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / double(xs.size()));
}

Vec2 clamp_speed(Vec2 v, double max_speed) {
    double n = v.norm();
    if (n > max_speed) v = v * (max_speed / n);
    return v;
}

}  // namespace

Vec2 circle_step(const Vec2& self, const std::vector<PolarSighting>& known,
                 double target_radius, double max_speed) {
    if (known.size() < 2) return {0, 0};

    std::vector<Vec2> neighbors;
    neighbors.reserve(known.size());
    Vec2 centroid = self;
    for (const auto& [bearing, dist] : known) {
        Vec2 p = self + dir(bearing) * dist;
        neighbors.push_back(p);
        centroid += p;
    }
    centroid = centroid * (1.0 / double(known.size() + 1));

    Vec2 radial = self - centroid;
    double r = radial.norm();
    Vec2 out = r > 1e-12 ? radial * (1.0 / r) : Vec2{1, 0};
    Vec2 v = out * (target_radius - r);

    // Tangential term: close the difference between the CCW gap to the next
    // neighbor and the CW gap to the previous one.
    double theta = std::atan2(radial.y, radial.x);
    double next = kTwoPi;
    double prev = kTwoPi;
    for (const Vec2& p : neighbors) {
        Vec2 rel = p - centroid;
        double ccw = wrap_angle(std::atan2(rel.y, rel.x) - theta);
        if (ccw <= 0) ccw += kTwoPi;
        next = std::min(next, ccw);
        prev = std::min(prev, kTwoPi - ccw);
    }
    double swing = (next - prev) / 2;
    v += out.perp() * (swing * r);

    return clamp_speed(v, max_speed);
}

Vec2 chain_step(const Vec2& self, const Vec2& left, const Vec2& right, double max_speed) {
    return clamp_speed((left + right) * 0.5 - self, max_speed);
}

double circle_error(const std::vector<Vec2>& positions, double target_radius) {
    std::size_t n = positions.size();
    if (n == 0) return std::numeric_limits<double>::infinity();
    Vec2 centroid{0, 0};
    for (const Vec2& p : positions) centroid += p;
    centroid = centroid * (1.0 / double(n));

    std::vector<double> dists;
    std::vector<double> angles;
    bool spread = false;
    for (const Vec2& p : positions) {
        Vec2 rel = p - centroid;
        dists.push_back(rel.norm());
        angles.push_back(std::atan2(rel.y, rel.x));
        if (rel.norm() > 1e-12) spread = true;
    }
    if (!spread) return std::numeric_limits<double>::infinity();

    std::sort(angles.begin(), angles.end());
    std::vector<double> gaps;
    for (std::size_t i = 0; i + 1 < n; ++i) gaps.push_back(angles[i + 1] - angles[i]);
    gaps.push_back(angles.front() + kTwoPi - angles.back());

    return population_stdev(dists) / target_radius +
           population_stdev(gaps) / (kTwoPi / double(n));
}

double chain_error(const std::vector<Vec2>& positions, const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double len = ab.norm();
    if (len < 1e-12) return std::numeric_limits<double>::infinity();
    Vec2 unit = ab * (1.0 / len);

    double worst = 0;
    std::vector<double> along;
    for (const Vec2& p : positions) {
        Vec2 rel = p - a;
        worst = std::max(worst, std::abs(unit.cross(rel)));
        along.push_back(rel.dot(unit));
    }
    along.push_back(0);
    along.push_back(len);
    std::sort(along.begin(), along.end());
    std::vector<double> spacings;
    for (std::size_t i = 0; i + 1 < along.size(); ++i) {
        spacings.push_back(along[i + 1] - along[i]);
    }

    double ideal = len / double(positions.size() + 1);
    return worst / len + population_stdev(spacings) / ideal;
}

std::pair<double, double> steer_to_point(const Pose& pose, const Vec2& target,
                                         double max_speed, double wheel_base, double dt) {
    Vec2 delta = target - pose.position;
    double dist = delta.norm();
    if (dist < 1e-9) return {0, 0};
    double err = wrap_angle(std::atan2(delta.y, delta.x) - pose.heading);
    if (std::abs(err) > 1e-9) {
        // Wheel speed that finishes the whole turn within one tick; larger
        // errors saturate at max_speed and take several ticks.
        double w = err * wheel_base / (2 * dt);
        w = std::clamp(w, -max_speed, max_speed);
        return {-w, w};
    }
    double speed = std::min(max_speed, dist / dt);
    return {speed, speed};
}

std::pair<double, double> steer_arc(double bearing, double cruise, double max_speed,
                                    double wheel_base) {
    double err = wrap_angle(bearing);
    double v = cruise * std::max(0.1, std::cos(err));
    double omega = 3.0 * err;
    double l = v - omega * wheel_base / 2;
    double r = v + omega * wheel_base / 2;
    double peak = std::max(std::abs(l), std::abs(r));
    if (peak > max_speed) {
        l *= max_speed / peak;
        r *= max_speed / peak;
    }
    return {l, r};
}

}  // namespace jade::scenarios
