#include "idiobot/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace idiobot {

World::World(WorldMap map, SimConfig config) : map_(std::move(map)), config_(config) {
    map_.validate();
    sealed_.assign(map_.doors.size(), false);
    obstacles_ = map_.walls;
    const Bounds& b = map_.bounds;
    obstacles_.push_back({{b.xmin, b.ymin}, {b.xmax, b.ymin}});
    obstacles_.push_back({{b.xmax, b.ymin}, {b.xmax, b.ymax}});
    obstacles_.push_back({{b.xmax, b.ymax}, {b.xmin, b.ymax}});
    obstacles_.push_back({{b.xmin, b.ymax}, {b.xmin, b.ymin}});
}

std::size_t World::sealed_count() const noexcept {
    return static_cast<std::size_t>(std::count(sealed_.begin(), sealed_.end(), true));
}

bool World::seal(std::size_t door) {
    if (sealed_.at(door)) return false;
    sealed_[door] = true;
    obstacles_.push_back(map_.doors[door].span);
    return true;
}

RobotState step_physics(const World& world, const RobotState& robot, MotionCommand command, double dt) {
    const SimConfig& cfg = world.config();
    const double radius = cfg.robot_radius;
    const double skin = cfg.contact_skin;
    command.linear_m_s = std::clamp(command.linear_m_s, -kMaxSpeed, kMaxSpeed);

    RobotState out = robot;
    out.command = command;
    out.odometer = 0.0;
    out.contact = false;
    Vec2 pos = robot.pose.position();
    double heading = robot.pose.heading_deg;

    double remaining = dt;
    while (remaining > 1e-12) {
        const double h = std::min(cfg.substep, remaining);
        remaining -= h;
        heading = wrap_degrees(heading + command.angular_deg_s * h);

        const double step_len = std::abs(command.linear_m_s) * h;
        if (step_len <= 0.0) continue;
        const Vec2 dir = heading_vector(heading) * (command.linear_m_s < 0.0 ? -1.0 : 1.0);
        const Vec2 delta = dir * step_len;

        double allowed = 1.0;
        bool hit = false;
        for (const Segment& s : world.obstacles()) {
            const double d0 = point_segment_distance(pos, s);
            if (d0 < radius + 2.0 * skin) {
                // Touching or overlapping: only motion towards the wall is blocked.
                if (dot(delta, closest_point(pos, s) - pos) > 0.0) {
                    allowed = 0.0;
                    hit = true;
                }
                continue;
            }
            if (auto t = sweep_disc(pos, delta, radius, s); t && *t < allowed) {
                allowed = *t;
                hit = true;
            }
        }
        double travel = allowed * step_len;
        if (hit) {
            travel = std::max(0.0, travel - skin);
            out.contact = true;
        }
        pos = pos + dir * travel;
        out.odometer += travel;
    }
    out.pose = {pos.x, pos.y, heading};
    return out;
}

double LaserScan::ray_angle(std::size_t i) const noexcept {
    if (ranges.size() < 2) return 0.0;
    return 90.0 - 180.0 * static_cast<double>(i) / static_cast<double>(ranges.size() - 1);
}

int subsector_for_bearing(double bearing) noexcept {
    // Left sectors include -30 and the right sectors include +30.
    if (bearing <= -60.0) return 1;
    if (bearing <= -30.0) return 2;
    if (bearing <= 0.0) return 3;
    if (bearing < 30.0) return 4;
    if (bearing < 60.0) return 5;
    return 6;
}

int LaserScan::subsector(std::size_t i) const noexcept { return subsector_for_bearing(scan_bearing(i)); }

double cast_ray(const World& world, Vec2 origin, Vec2 dir, double max_range) {
    double best = max_range;
    for (const Segment& s : world.obstacles()) {
        if (auto t = ray_segment_distance(origin, dir, s); t && *t < best) best = *t;
    }
    return best;
}

namespace {

double hull_range(const World& world, const RobotState& robot, double relative_deg, double max_range) {
    const SimConfig& cfg = world.config();
    const Vec2 dir = heading_vector(robot.pose.heading_deg + relative_deg);
    const Vec2 origin = robot.pose.position() + dir * cfg.robot_radius;
    return std::max(cfg.min_range, cast_ray(world, origin, dir, max_range));
}

}  // namespace

LaserScan sense_laser(const World& world, const RobotState& robot) {
    const SimConfig& cfg = world.config();
    LaserScan scan;
    scan.ranges.resize(cfg.laser_rays);
    for (std::size_t i = 0; i < cfg.laser_rays; ++i) {
        scan.ranges[i] = hull_range(world, robot, scan.ray_angle(i), cfg.laser_range);
    }
    return scan;
}

double sonar_angle(std::size_t k, std::size_t count) noexcept {
    return 90.0 + 180.0 * (static_cast<double>(k) + 0.5) / static_cast<double>(count);
}

SonarReadings sense_sonar(const World& world, const RobotState& robot) {
    const SimConfig& cfg = world.config();
    SonarReadings out;
    out.ranges.resize(cfg.sonar_count);
    for (std::size_t k = 0; k < cfg.sonar_count; ++k) {
        out.ranges[k] = hull_range(world, robot, sonar_angle(k, cfg.sonar_count), cfg.sonar_range);
    }
    return out;
}

BlobDetection sense_camera(const World& world, const RobotState& robot) {
    const SimConfig& cfg = world.config();
    const Vec2 pos = robot.pose.position();
    BlobDetection best;
    double best_dist = std::numeric_limits<double>::infinity();
    const auto& doors = world.map().doors;
    for (std::size_t i = 0; i < doors.size(); ++i) {
        if (world.sealed(i)) continue;
        const Vec2 marker = doors[i].span.midpoint();
        const Vec2 v = marker - pos;
        const double dist = norm(v);
        if (dist > cfg.camera_range || dist >= best_dist) continue;
        const double bearing = wrap_degrees(rad_to_deg(std::atan2(v.y, v.x)) - robot.pose.heading_deg);
        if (std::abs(bearing) > cfg.camera_fov_deg / 2.0) continue;
        const Segment sight{pos, marker};
        const bool blocked = std::any_of(world.obstacles().begin(), world.obstacles().end(),
                                         [&](const Segment& s) { return segments_intersect(sight, s); });
        if (blocked) continue;
        best = {true, bearing, dist, doors[i].marker_order};
        best_dist = dist;
    }
    return best;
}

StallState detect_stall(double interval_distance, double rear_average) noexcept {
    if (interval_distance > 0.0) return StallState::none;
    return rear_average < kBlockedBehindRange ? StallState::blocked_behind : StallState::stalled;
}

ProgressEvent advance_progression(World& world, Vec2 from, Vec2 to) {
    ProgressEvent ev;
    const Vec2 path = to - from;
    const auto& doors = world.map().doors;
    for (std::size_t i = 0; i < doors.size(); ++i) {
        if (world.sealed(i)) continue;
        const Segment& span = doors[i].span;
        const Vec2 e = span.b - span.a;
        const bool side_from = cross(e, from - span.a) > 0.0;
        const bool side_to = cross(e, to - span.a) > 0.0;
        if (side_from == side_to) continue;
        const double denom = cross(path, e);
        if (denom == 0.0) continue;
        const double u = cross(span.a - from, path) / denom;
        if (u < 0.0 || u > 1.0) continue;
        world.seal(i);
        ++ev.doors_passed;
        if (i + 1 == doors.size()) {
            world.mark_completed();
            ev.completed = true;
        }
    }
    return ev;
}

}  // namespace idiobot
