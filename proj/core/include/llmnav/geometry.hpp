#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <numbers>

namespace llmnav {

/// Planar point or vector in the world frame, meters.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

/// Axis-aligned rectangle, meters. Closed set [x_min, x_max] x [y_min, y_max].
struct Rect {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    constexpr double width() const { return x_max - x_min; }
    constexpr double height() const { return y_max - y_min; }
    constexpr bool contains(Vec2 p) const {
        return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
    }
    constexpr bool intersects(const Rect& o) const {
        return x_min <= o.x_max && o.x_min <= x_max && y_min <= o.y_max && o.y_min <= y_max;
    }
    friend constexpr bool operator==(const Rect&, const Rect&) = default;
};

/// Planar pose: position plus heading (rad, counter-clockwise from +x).
struct Pose2 {
    Vec2 position;
    double heading = 0.0;
    friend constexpr bool operator==(const Pose2&, const Pose2&) = default;
};

/// Grid index. Row follows y, column follows x.
struct Cell {
    int row = 0;
    int col = 0;
    friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
    double r = std::remainder(a, 2.0 * std::numbers::pi);
    if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
    return r;
}

}  // namespace llmnav
