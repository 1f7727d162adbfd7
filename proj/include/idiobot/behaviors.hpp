#pragma once

// Sensor frames to antigens, antibodies to motion commands, and the
// reinforcement verdict on each executed action.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "idiobot/immune_core.hpp"
#include "idiobot/world.hpp"

namespace idiobot {

inline constexpr std::size_t kNumAntigens = 8;
inline constexpr std::size_t kNumAntibodies = 16;

namespace antigen {
inline constexpr std::size_t object_left = 0;
inline constexpr std::size_t object_centre = 1;
inline constexpr std::size_t object_right = 2;
inline constexpr std::size_t open_space = 3;
inline constexpr std::size_t cramped = 4;
inline constexpr std::size_t stalled = 5;
inline constexpr std::size_t blocked_behind = 6;
inline constexpr std::size_t marker_seen = 7;
}  // namespace antigen

struct AntigenInfo {
    std::string_view name;
    int priority;  ///< 0 least urgent, 5 most urgent
};

inline constexpr std::array<AntigenInfo, kNumAntigens> kAntigens = {{
    {"object_left", 2},
    {"object_centre", 2},
    {"object_right", 2},
    {"open_space", 0},
    {"cramped", 3},
    {"stalled", 4},
    {"blocked_behind", 5},
    {"marker_seen", 1},
}};

enum class Steering { fixed, toward_max, away_from_min, toward_marker };

struct AntibodyInfo {
    std::string_view name;
    Steering steering;
    double angular_deg_s;  ///< used when steering is fixed
    double linear_m_s;
};

inline constexpr std::array<AntibodyInfo, kNumAntibodies> kAntibodies = {{
    {"reverse_spin_1", Steering::fixed, -90.0, -0.15},
    {"slow_right_15", Steering::fixed, -15.0, 0.06},
    {"slow_left_15", Steering::fixed, 15.0, 0.06},
    {"fast_centre", Steering::fixed, 0.0, kMaxSpeed / 2.0},
    {"fast_left_15", Steering::fixed, 15.0, kMaxSpeed / 2.0},
    {"fast_right_15", Steering::fixed, -15.0, kMaxSpeed / 2.0},
    {"slow_right_35", Steering::fixed, -35.0, 0.06},
    {"slow_left_35", Steering::fixed, 35.0, 0.06},
    {"fast_left_35", Steering::fixed, 35.0, kMaxSpeed / 2.0},
    {"fast_right_35", Steering::fixed, -35.0, kMaxSpeed / 2.0},
    {"reverse_spin_2", Steering::fixed, 90.0, -0.15},
    {"wander_max", Steering::toward_max, 0.0, kMaxSpeed},
    {"wander_min", Steering::away_from_min, 0.0, kMaxSpeed / 2.0},
    {"track_blobs", Steering::toward_marker, 0.0, kMaxSpeed},
    {"reverse_1", Steering::fixed, -25.0, -0.15},
    {"reverse_2", Steering::fixed, 25.0, -0.15},
}};

inline constexpr double kObjectRange = 0.55;
inline constexpr double kAverageRangeThreshold = 0.45;
inline constexpr double kSteeringGain = 1.5;      // (deg/s) per degree of bearing error
inline constexpr double kMaxSteeringRate = 90.0;  // deg/s

struct SensorMetrics {
    double z_min = 0.0;
    double z_av = 0.0;
    double z_max = 0.0;
    int r_min = 3;                ///< subsector 1..6 of the minimal laser ray
    double z_min_angle_deg = 0.0;  ///< heading-relative, counter-clockwise
    double z_max_angle_deg = 0.0;
    double e_av = 0.0;            ///< mean rear sonar range
    double distance = 0.0;        ///< travelled over the last control interval
    bool odometry_valid = false;  ///< false before the first interval completes
    BlobDetection marker;
    bool door_passed = false;  ///< a doorway was crossed during the last interval
};

/// `odometry` is empty before the first control interval has elapsed.
SensorMetrics compute_metrics(const LaserScan& laser, const SonarReadings& sonar, std::optional<double> odometry,
                              const BlobDetection& camera, bool door_passed = false);

/// Sorted antigen indices presenting for these metrics.
std::vector<std::size_t> detect_antigens(const SensorMetrics& m);

/// Picks the highest-priority member as dominant. Throws on an empty set.
AntigenPresentation dominant_antigen(const std::vector<std::size_t>& antigens);

/// Motion command for an antibody. Throws StructuralError on an unknown index.
MotionCommand action_for(std::size_t antibody, const SensorMetrics& m);

struct ScoringConfig {
    double reward = 0.05;           ///< |tau|
    double progress_distance = 0.6;  ///< metres per interval that count as progress in open space
    double clear_range = 1.0;        ///< Z_min at which a shrinking clearance still counts as open
};

/// Reinforcement score for the action executed between `before` and `after`,
/// judged against the dominant antigen `d` of `before`. Returns +reward when
/// the situation improved, -reward otherwise.
double score_outcome(const SensorMetrics& before, const SensorMetrics& after, std::size_t d,
                     const ScoringConfig& config = {});

/// Text manifest of the antigen and antibody tables.
std::string behaviour_manifest();

}  // namespace idiobot
