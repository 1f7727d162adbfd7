#pragma once

#include <cmath>
#include <numbers>
#include <optional>

namespace idiobot {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const noexcept { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const noexcept { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const noexcept { return {x * s, y * s}; }
    constexpr bool operator==(const Vec2&) const = default;
};

constexpr double dot(Vec2 a, Vec2 b) noexcept { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) noexcept { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) noexcept { return std::hypot(v.x, v.y); }

struct Segment {
    Vec2 a;
    Vec2 b;
    [[nodiscard]] double length() const noexcept { return norm(b - a); }
    [[nodiscard]] Vec2 midpoint() const noexcept { return (a + b) * 0.5; }
    constexpr bool operator==(const Segment&) const = default;
};

constexpr double deg_to_rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / std::numbers::pi; }

/// Wraps an angle in degrees into (-180, 180].
double wrap_degrees(double deg) noexcept;

/// Unit vector for a heading in degrees, counter-clockwise from +x.
Vec2 heading_vector(double deg) noexcept;

/// Distance along a ray (unit `dir`) to its first hit on `s`, if any.
/// Collinear overlaps report the nearest overlapping point.
std::optional<double> ray_segment_distance(Vec2 origin, Vec2 dir, const Segment& s) noexcept;

/// True when the closed segments share at least one point.
bool segments_intersect(const Segment& p, const Segment& q) noexcept;

/// True when the open segments cross at a single interior point of both.
bool segments_cross_properly(const Segment& p, const Segment& q) noexcept;

Vec2 closest_point(Vec2 p, const Segment& s) noexcept;
double point_segment_distance(Vec2 p, const Segment& s) noexcept;

/// Earliest fraction t in [0, 1] at which a disc of `radius` centred at
/// `start + t * delta` touches `s`. Assumes the disc starts clear of `s`.
std::optional<double> sweep_disc(Vec2 start, Vec2 delta, double radius, const Segment& s) noexcept;

}  // namespace idiobot
