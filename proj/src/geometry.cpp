#include "idiobot/geometry.hpp"

#include <algorithm>

namespace idiobot {
namespace {

constexpr double kParallelEps = 1e-12;

int orientation(Vec2 a, Vec2 b, Vec2 c) noexcept {
    const double v = cross(b - a, c - a);
    return (v > 0.0) - (v < 0.0);
}

bool on_segment(Vec2 p, const Segment& s) noexcept {
    return std::min(s.a.x, s.b.x) <= p.x && p.x <= std::max(s.a.x, s.b.x) && std::min(s.a.y, s.b.y) <= p.y &&
           p.y <= std::max(s.a.y, s.b.y);
}

// Smallest t >= 0 with |start + t*delta - centre| = radius, entering the circle.
std::optional<double> sweep_point_circle(Vec2 start, Vec2 delta, Vec2 centre, double radius) noexcept {
    const Vec2 f = start - centre;
    const double a = dot(delta, delta);
    const double b = 2.0 * dot(f, delta);
    const double c = dot(f, f) - radius * radius;
    if (a <= 0.0 || b >= 0.0) return std::nullopt;  // stationary or moving away
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return std::nullopt;
    const double t = (-b - std::sqrt(disc)) / (2.0 * a);
    if (t < 0.0) return c <= 0.0 ? std::optional<double>(0.0) : std::nullopt;
    return t;
}

}  // namespace

double wrap_degrees(double deg) noexcept {
    double w = std::fmod(deg, 360.0);
    if (w <= -180.0) w += 360.0;
    if (w > 180.0) w -= 360.0;
    return w;
}

Vec2 heading_vector(double deg) noexcept {
    const double r = deg_to_rad(deg);
    return {std::cos(r), std::sin(r)};
}

std::optional<double> ray_segment_distance(Vec2 origin, Vec2 dir, const Segment& s) noexcept {
    const Vec2 e = s.b - s.a;
    const double denom = cross(dir, e);
    const Vec2 w = s.a - origin;
    if (std::abs(denom) < kParallelEps) {
        if (std::abs(cross(w, dir)) > kParallelEps) return std::nullopt;
        // Collinear: nearest endpoint ahead of the origin, or the origin itself if inside.
        const double ta = dot(s.a - origin, dir);
        const double tb = dot(s.b - origin, dir);
        if (ta < 0.0 && tb < 0.0) return std::nullopt;
        if (ta <= 0.0 || tb <= 0.0) return 0.0;
        return std::min(ta, tb);
    }
    const double t = cross(w, e) / denom;
    const double u = cross(w, dir) / denom;
    if (t < 0.0 || u < 0.0 || u > 1.0) return std::nullopt;
    return t;
}

bool segments_intersect(const Segment& p, const Segment& q) noexcept {
    const int o1 = orientation(p.a, p.b, q.a);
    const int o2 = orientation(p.a, p.b, q.b);
    const int o3 = orientation(q.a, q.b, p.a);
    const int o4 = orientation(q.a, q.b, p.b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(q.a, p)) return true;
    if (o2 == 0 && on_segment(q.b, p)) return true;
    if (o3 == 0 && on_segment(p.a, q)) return true;
    if (o4 == 0 && on_segment(p.b, q)) return true;
    return false;
}

bool segments_cross_properly(const Segment& p, const Segment& q) noexcept {
    const int o1 = orientation(p.a, p.b, q.a);
    const int o2 = orientation(p.a, p.b, q.b);
    const int o3 = orientation(q.a, q.b, p.a);
    const int o4 = orientation(q.a, q.b, p.b);
    return o1 * o2 < 0 && o3 * o4 < 0;
}

Vec2 closest_point(Vec2 p, const Segment& s) noexcept {
    const Vec2 e = s.b - s.a;
    const double len2 = dot(e, e);
    if (len2 <= 0.0) return s.a;
    const double t = std::clamp(dot(p - s.a, e) / len2, 0.0, 1.0);
    return s.a + e * t;
}

double point_segment_distance(Vec2 p, const Segment& s) noexcept { return norm(p - closest_point(p, s)); }

std::optional<double> sweep_disc(Vec2 start, Vec2 delta, double radius, const Segment& s) noexcept {
    std::optional<double> best;
    auto consider = [&](std::optional<double> t) {
        if (t && *t >= 0.0 && *t <= 1.0 && (!best || *t < *best)) best = t;
    };

    const Vec2 e = s.b - s.a;
    const double len = norm(e);
    if (len > 0.0) {
        const Vec2 u = e * (1.0 / len);
        const Vec2 n{-u.y, u.x};
        const double h0 = dot(start - s.a, n);
        const double dh = dot(delta, n);
        if (std::abs(h0) >= radius && h0 * dh < 0.0) {
            const double target = h0 > 0.0 ? radius : -radius;
            const double t = (target - h0) / dh;
            const double along = dot(start + delta * t - s.a, u);
            if (along >= 0.0 && along <= len) consider(t);
        }
    }
    consider(sweep_point_circle(start, delta, s.a, radius));
    consider(sweep_point_circle(start, delta, s.b, radius));
    return best;
}

}  // namespace idiobot
