#pragma once

#include <cmath>
#include <numbers>

namespace jade {

/// 2D vector in world units.
struct Vec2 {
    double x{0.0};
    double y{0.0};

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(const Vec2& r) const { return {x + r.x, y + r.y}; }
    constexpr Vec2 operator-(const Vec2& r) const { return {x - r.x, y - r.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    friend constexpr Vec2 operator*(double s, const Vec2& v) { return {v.x * s, v.y * s}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    Vec2& operator+=(const Vec2& r) { x += r.x; y += r.y; return *this; }
    Vec2& operator-=(const Vec2& r) { x -= r.x; y -= r.y; return *this; }
    constexpr bool operator==(const Vec2& r) const = default;

    constexpr double dot(const Vec2& r) const { return x * r.x + y * r.y; }
    /// z-component of the 3D cross product; positive when r is CCW of *this.
    constexpr double cross(const Vec2& r) const { return x * r.y - y * r.x; }
    double norm() const { return std::hypot(x, y); }
    constexpr double norm_sq() const { return x * x + y * y; }

    /// Unit vector, or {0,0} when the length is at or below eps.
    Vec2 normalized(double eps = 1e-12) const {
        double n = norm();
        if (n <= eps) return {0.0, 0.0};
        return {x / n, y / n};
    }

    /// 90-degree CCW rotation.
    constexpr Vec2 perp() const { return {-y, x}; }

    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

/// Unit vector at angle `a` (radians, CCW from +x).
inline Vec2 dir(double a) { return {std::cos(a), std::sin(a)}; }

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Normalize an angle into [-pi, pi). wrap_angle(pi) == -pi.
inline double wrap_angle(double a) {
    double r = std::remainder(a, kTwoPi);
    if (r >= kPi) r -= kTwoPi;
    else if (r < -kPi) r += kTwoPi;
    return r;
}

/// Pose of a body: position plus heading, heading always kept in [-pi, pi).
struct Pose {
    Vec2 position{};
    double heading{0.0};

    constexpr Pose() = default;
    Pose(Vec2 p, double h) : position(p), heading(wrap_angle(h)) {}
    Pose(double x, double y, double h) : position(x, y), heading(wrap_angle(h)) {}

    Vec2 forward() const { return dir(heading); }
    bool finite() const { return position.finite() && std::isfinite(heading); }
    constexpr bool operator==(const Pose& r) const = default;
};

}  // namespace jade
