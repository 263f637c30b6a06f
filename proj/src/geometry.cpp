#include "jade/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace jade {

double Polygon::area() const {
    double twice = 0;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const Vec2& a = vertices[i];
        const Vec2& b = vertices[(i + 1) % vertices.size()];
        twice += a.cross(b);
    }
    return twice / 2;
}

bool Polygon::convex_ccw() const {
    if (vertices.size() < 3) return false;
    if (area() <= 1e-12) return false;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const Vec2& a = vertices[i];
        const Vec2& b = vertices[(i + 1) % vertices.size()];
        const Vec2& c = vertices[(i + 2) % vertices.size()];
        if ((b - a).cross(c - b) < -1e-12) return false;
    }
    return true;
}

bool Polygon::contains(const Vec2& p) const {
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const Vec2& a = vertices[i];
        const Vec2& b = vertices[(i + 1) % vertices.size()];
        if ((b - a).cross(p - a) < 0) return false;
    }
    return true;
}

Pose integrate_unicycle(const Pose& pose, double v_left, double v_right, double wheel_base,
                        double dt) {
    if (!pose.finite() || !std::isfinite(v_left) || !std::isfinite(v_right) ||
        !std::isfinite(wheel_base) || !std::isfinite(dt))
        throw std::invalid_argument("integrate_unicycle: non-finite input");
    if (wheel_base <= 0) throw std::invalid_argument("integrate_unicycle: wheel_base must be > 0");
    if (dt <= 0) throw std::invalid_argument("integrate_unicycle: dt must be > 0");

    double v = (v_left + v_right) / 2;
    double omega = (v_right - v_left) / wheel_base;
    double theta = pose.heading;
    if (std::abs(omega) < 1e-12) {
        return Pose(pose.position + dir(theta) * (v * dt), theta);
    }
    double theta2 = theta + omega * dt;
    double r = v / omega;
    Vec2 delta{r * (std::sin(theta2) - std::sin(theta)), -r * (std::cos(theta2) - std::cos(theta))};
    return Pose(pose.position + delta, theta2);
}

namespace {

// Ray vs segment. Returns the ray parameter t >= 0 of the nearest crossing.
std::optional<double> ray_segment(const Vec2& origin, const Vec2& d, const Vec2& a,
                                  const Vec2& b) {
    Vec2 e = b - a;
    double denom = d.cross(e);
    if (std::abs(denom) < 1e-15) return std::nullopt;  // parallel
    Vec2 ao = a - origin;
    double t = ao.cross(e) / denom;
    double u = ao.cross(d) / denom;
    if (t < 0 || u < 0 || u > 1) return std::nullopt;
    return t;
}

// Ray vs circle. Nearest non-negative parameter.
std::optional<double> ray_circle(const Vec2& origin, const Vec2& d, const Vec2& center,
                                 double radius) {
    Vec2 oc = origin - center;
    double b = oc.dot(d);
    double c = oc.norm_sq() - radius * radius;
    double disc = b * b - c;
    if (disc < 0) return std::nullopt;
    double sq = std::sqrt(disc);
    double t = -b - sq;
    if (t < 0) t = -b + sq;
    if (t < 0) return std::nullopt;
    return t;
}

// Closest point on segment [a,b] to p.
Vec2 closest_on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 e = b - a;
    double len2 = e.norm_sq();
    if (len2 < 1e-24) return a;
    double t = std::clamp((p - a).dot(e) / len2, 0.0, 1.0);
    return a + e * t;
}

// Interior distance from p (inside the convex polygon) to the nearest edge,
// with the edge's outward normal.
std::pair<double, Vec2> interior_edge_distance(const Polygon& poly, const Vec2& p) {
    double best = std::numeric_limits<double>::infinity();
    Vec2 normal{1, 0};
    for (std::size_t i = 0; i < poly.vertices.size(); ++i) {
        const Vec2& a = poly.vertices[i];
        const Vec2& b = poly.vertices[(i + 1) % poly.vertices.size()];
        Vec2 edge = b - a;
        Vec2 n = Vec2(edge.y, -edge.x).normalized();  // outward normal for CCW winding
        double dist = (edge.normalized()).cross(p - a);  // perpendicular distance inside the edge
        if (dist < best) {
            best = dist;
            normal = n;
        }
    }
    return {best, normal};
}

}  // namespace

std::optional<std::pair<double, ObjectRef>> ray_cast(const WorldMap& world, const Vec2& origin,
                                                     double angle, double max_range,
                                                     int ignore_id,
                                                     const std::vector<Body>& agents) {
    if (max_range <= 0) throw std::invalid_argument("ray_cast: max_range must be > 0");
    Vec2 d = dir(angle);
    double best = std::numeric_limits<double>::infinity();
    std::optional<ObjectRef> hit;

    // Candidates are scanned in a fixed priority order (walls, then obstacles
    // by index, then agents by id) and equal distances keep the earlier one.
    auto consider = [&](std::optional<double> t, ObjectRef ref) {
        if (!t || *t > max_range || *t >= best) return;
        best = *t;
        hit = ref;
    };

    const Vec2 corners[4] = {{0, 0}, {world.width, 0}, {world.width, world.height},
                             {0, world.height}};
    for (int i = 0; i < 4; ++i)
        consider(ray_segment(origin, d, corners[i], corners[(i + 1) % 4]),
                 {ObjectRef::Kind::Wall, -1});
    for (std::size_t oi = 0; oi < world.obstacles.size(); ++oi) {
        const auto& poly = world.obstacles[oi];
        for (std::size_t i = 0; i < poly.vertices.size(); ++i)
            consider(ray_segment(origin, d, poly.vertices[i],
                                 poly.vertices[(i + 1) % poly.vertices.size()]),
                     {ObjectRef::Kind::Obstacle, int(oi)});
    }
    for (const auto& body : agents) {
        if (body.id == ignore_id) continue;
        consider(ray_circle(origin, d, body.center, body.radius),
                 {ObjectRef::Kind::Agent, body.id});
    }
    if (!hit) return std::nullopt;
    return std::make_pair(best, *hit);
}

std::optional<Contact> disc_penetration(const WorldMap& world, const Vec2& center, double radius,
                                        int self_id, const std::vector<Body>& agents) {
    if (radius <= 0) throw std::invalid_argument("disc_penetration: radius must be > 0");
    std::optional<Contact> best;

    auto consider = [&](double depth, const Vec2& point, const Vec2& normal, ObjectRef ref) {
        if (depth <= kContactEpsilon) return;
        if (!best || depth > best->depth) best = Contact{point, normal, ref, depth};
    };

    // Arena walls; normals point inward (into the arena, toward the agent).
    consider(radius - center.x, {0, center.y}, {1, 0}, {ObjectRef::Kind::Wall, -1});
    consider(radius - (world.width - center.x), {world.width, center.y}, {-1, 0},
             {ObjectRef::Kind::Wall, -1});
    consider(radius - center.y, {center.x, 0}, {0, 1}, {ObjectRef::Kind::Wall, -1});
    consider(radius - (world.height - center.y), {center.x, world.height}, {0, -1},
             {ObjectRef::Kind::Wall, -1});

    for (std::size_t oi = 0; oi < world.obstacles.size(); ++oi) {
        const auto& poly = world.obstacles[oi];
        if (poly.contains(center)) {
            auto [inside, normal] = interior_edge_distance(poly, center);
            consider(radius + inside, center, normal, {ObjectRef::Kind::Obstacle, int(oi)});
            continue;
        }
        double nearest = std::numeric_limits<double>::infinity();
        Vec2 point;
        for (std::size_t i = 0; i < poly.vertices.size(); ++i) {
            Vec2 q = closest_on_segment(center, poly.vertices[i],
                                        poly.vertices[(i + 1) % poly.vertices.size()]);
            double dist = distance(center, q);
            if (dist < nearest) {
                nearest = dist;
                point = q;
            }
        }
        Vec2 normal = (center - point).normalized();
        if (normal == Vec2{0, 0}) normal = {1, 0};
        consider(radius - nearest, point, normal, {ObjectRef::Kind::Obstacle, int(oi)});
    }

    for (const auto& body : agents) {
        if (body.id == self_id) continue;
        double dist = distance(center, body.center);
        double depth = radius + body.radius - dist;
        if (depth <= kContactEpsilon) continue;
        Vec2 normal = (center - body.center).normalized();
        if (normal == Vec2{0, 0}) normal = {1, 0};
        Vec2 point = body.center + normal * body.radius;
        consider(depth, point, normal, {ObjectRef::Kind::Agent, body.id});
    }
    return best;
}

MoveResult move_with_collision(const WorldMap& world, const Body& body, const Pose& pose,
                               double v_left, double v_right, double wheel_base, double dt,
                               const std::vector<Body>& agents) {
    auto at = [&](double t) {
        return t <= 0 ? pose : integrate_unicycle(pose, v_left, v_right, wheel_base, t);
    };
    auto free_at = [&](const Pose& p) {
        return !disc_penetration(world, p.position, body.radius, body.id, agents).has_value();
    };

    double speed = std::max(std::abs(v_left), std::abs(v_right));
    if (speed * dt < 1e-15) return {pose, std::nullopt};

    // Swept check: sample the arc at steps no longer than half the body
    // radius so thin obstacles cannot be skipped over.
    double step_len = std::max(body.radius * 0.5, 1e-6);
    int samples = std::max(1, int(std::ceil(speed * dt / step_len)));

    double t_free = 0;  // pose(t_free) known collision-free (t=0 by precondition)
    double t_hit = -1;
    for (int i = 1; i <= samples; ++i) {
        double t = dt * i / samples;
        if (free_at(at(t))) {
            t_free = t;
        } else {
            t_hit = t;
            break;
        }
    }
    if (t_hit < 0) return {at(dt), std::nullopt};

    // Bisect between the last free and first colliding samples until the two
    // candidate poses are within tolerance in world space.
    while (distance(at(t_free).position, at(t_hit).position) > kBisectTolerance) {
        double mid = (t_free + t_hit) / 2;
        if (free_at(at(mid))) t_free = mid;
        else t_hit = mid;
    }
    Pose stop = t_free > 0 ? at(t_free) : pose;
    auto contact = disc_penetration(world, at(t_hit).position, body.radius, body.id, agents);
    if (contact) contact->depth = 0;  // reported at the touching pose, not the probe pose
    return {stop, contact};
}

double floor_brightness(const WorldMap& world, const Vec2& point) {
    if (!world.in_bounds(point)) throw std::out_of_range("floor_brightness: point outside bounds");
    const auto& grid = world.floor;
    double cell_w = world.width / grid.cols;
    double cell_h = world.height / grid.rows;
    int col = std::min(int(std::floor(point.x / cell_w)), grid.cols - 1);
    int row = std::min(int(std::floor(point.y / cell_h)), grid.rows - 1);
    return grid.at(row, col);
}

}  // namespace jade
