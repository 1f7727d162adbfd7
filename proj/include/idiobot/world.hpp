#pragma once

// Deterministic 2D maze world for a disc-shaped differential-drive robot.
//
// Conventions: headings and angular speeds are degrees, counter-clockwise
// positive. Laser rays are stored left to right; ray i points at
// 90 - i * 180 / (n - 1) degrees relative to the heading. Sector numbering
// follows the scan bearing (ray angle measured clockwise from straight
// ahead): sectors 1-2 are the left side, 3-4 the centre, 5-6 the right.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "idiobot/geometry.hpp"

namespace idiobot {

inline constexpr double kMaxSpeed = 2.0;  // m/s

struct Pose {
    double x = 0.0;
    double y = 0.0;
    double heading_deg = 0.0;
    [[nodiscard]] Vec2 position() const noexcept { return {x, y}; }
    bool operator==(const Pose&) const = default;
};

struct Bounds {
    double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;
    [[nodiscard]] bool contains(Vec2 p) const noexcept {
        return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
    }
    bool operator==(const Bounds&) const = default;
};

struct Door {
    Segment span;  ///< doorway between the two posts; the marker sits at its midpoint
    int marker_order = 0;
    bool operator==(const Door&) const = default;
};

struct WorldMap {
    std::vector<Segment> walls;
    std::vector<Door> doors;  ///< kept sorted by marker_order
    Pose start;
    Bounds bounds;

    /// Throws MapError when the map is structurally unusable.
    void validate() const;
    bool operator==(const WorldMap&) const = default;
};

class MapError : public std::runtime_error {
public:
    MapError(const std::string& message, std::size_t line = 0, std::size_t column = 0);
    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Parses the line-oriented map format (`wall`, `door`, `start`, `bounds`
/// records, `#` comments) and validates the result.
WorldMap parse_map(std::string_view text);
std::string save_map(const WorldMap& map);
WorldMap load_map(const std::filesystem::path& path);

struct SimConfig {
    double robot_radius = 0.25;
    double control_interval = 0.5;  // s
    double substep = 0.05;          // s
    std::size_t laser_rays = 181;
    double laser_range = 8.0;
    std::size_t sonar_count = 8;
    double sonar_range = 5.0;
    double camera_fov_deg = 60.0;
    double camera_range = 5.0;
    double min_range = 1e-3;     // no sensor reports less than this
    double contact_skin = 1e-3;  // clearance kept from walls after a contact stop
};

struct MotionCommand {
    double angular_deg_s = 0.0;
    double linear_m_s = 0.0;
    bool operator==(const MotionCommand&) const = default;
};

struct RobotState {
    Pose pose;
    MotionCommand command;
    double odometer = 0.0;  ///< distance travelled during the last step_physics call
    bool contact = false;   ///< the last step ended against a wall
};

/// Runtime world: the map plus doors sealed behind the robot.
class World {
public:
    explicit World(WorldMap map, SimConfig config = {});

    [[nodiscard]] const WorldMap& map() const noexcept { return map_; }
    [[nodiscard]] const SimConfig& config() const noexcept { return config_; }
    /// Walls, bounds edges and sealed doorways.
    [[nodiscard]] const std::vector<Segment>& obstacles() const noexcept { return obstacles_; }
    [[nodiscard]] bool sealed(std::size_t door) const { return sealed_.at(door); }
    [[nodiscard]] std::size_t sealed_count() const noexcept;
    [[nodiscard]] bool completed() const noexcept { return completed_; }

    /// Seals a doorway and retires its marker. Returns false if already sealed.
    bool seal(std::size_t door);
    void mark_completed() noexcept { completed_ = true; }

private:
    WorldMap map_;
    SimConfig config_;
    std::vector<bool> sealed_;
    std::vector<Segment> obstacles_;
    bool completed_ = false;
};

/// Advances the robot by `dt` seconds under `command`, split into physics
/// substeps. Translation stops at the first wall contact along the swept path.
RobotState step_physics(const World& world, const RobotState& robot, MotionCommand command, double dt);

struct LaserScan {
    std::vector<double> ranges;  ///< left to right

    /// Angle of ray i relative to the heading, degrees counter-clockwise.
    [[nodiscard]] double ray_angle(std::size_t i) const noexcept;
    /// Scan bearing of ray i: clockwise from straight ahead, -90 is hard left.
    [[nodiscard]] double scan_bearing(std::size_t i) const noexcept { return -ray_angle(i); }
    /// Subsector 1..6 containing ray i.
    [[nodiscard]] int subsector(std::size_t i) const noexcept;
};

/// Maps a scan bearing in [-90, 90] to its 30-degree subsector 1..6.
int subsector_for_bearing(double bearing_deg) noexcept;

struct SonarReadings {
    std::vector<double> ranges;
};

struct BlobDetection {
    bool visible = false;
    double bearing_deg = 0.0;  ///< counter-clockwise from the heading
    double distance = 0.0;
    int marker_order = 0;
};

/// Distance from `origin` along `dir` to the nearest obstacle, capped at max_range.
double cast_ray(const World& world, Vec2 origin, Vec2 dir, double max_range);

LaserScan sense_laser(const World& world, const RobotState& robot);
SonarReadings sense_sonar(const World& world, const RobotState& robot);
BlobDetection sense_camera(const World& world, const RobotState& robot);

/// Direction of sonar k relative to the heading, degrees; the eight sonars
/// evenly span the rear half-circle.
double sonar_angle(std::size_t k, std::size_t count) noexcept;

enum class StallState { none, stalled, blocked_behind };

inline constexpr double kBlockedBehindRange = 0.35;

/// Zero distance over the interval is a stall; with the rear sonar average
/// below 0.35 m the robot is also blocked behind.
StallState detect_stall(double interval_distance, double rear_average) noexcept;

struct ProgressEvent {
    int doors_passed = 0;
    bool completed = false;
};

/// Seals every unsealed doorway crossed by the robot centre moving from
/// `from` to `to`. Passing the highest-order marker completes the task.
ProgressEvent advance_progression(World& world, Vec2 from, Vec2 to);

}  // namespace idiobot
