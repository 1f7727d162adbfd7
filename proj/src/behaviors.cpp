#include "idiobot/behaviors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "idiobot/matrix_io.hpp"

namespace idiobot {
namespace {

int priority(std::size_t a) { return kAntigens[a].priority; }

bool is_hazard(std::size_t a) { return priority(a) >= 2; }

double steer(double error_deg) {
    return std::clamp(kSteeringGain * error_deg, -kMaxSteeringRate, kMaxSteeringRate);
}

}  // namespace

SensorMetrics compute_metrics(const LaserScan& laser, const SonarReadings& sonar, std::optional<double> odometry,
                              const BlobDetection& camera, bool door_passed) {
    if (laser.ranges.empty()) throw StructuralError("empty laser scan");
    if (sonar.ranges.empty()) throw StructuralError("empty sonar reading");
    SensorMetrics m;
    const auto& r = laser.ranges;

    std::size_t min_i = 0;
    for (std::size_t i = 1; i < r.size(); ++i) {
        if (r[i] < r[min_i]) min_i = i;
    }
    // Among equally long rays prefer the one closest to straight ahead.
    std::size_t max_i = 0;
    for (std::size_t i = 1; i < r.size(); ++i) {
        if (r[i] > r[max_i] ||
            (r[i] == r[max_i] && std::abs(laser.ray_angle(i)) < std::abs(laser.ray_angle(max_i)))) {
            max_i = i;
        }
    }
    m.z_min = r[min_i];
    m.z_max = r[max_i];
    m.z_av = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
    m.z_av = std::clamp(m.z_av, m.z_min, m.z_max);
    m.r_min = laser.subsector(min_i);
    m.z_min_angle_deg = laser.ray_angle(min_i);
    m.z_max_angle_deg = laser.ray_angle(max_i);
    m.e_av = std::accumulate(sonar.ranges.begin(), sonar.ranges.end(), 0.0) /
             static_cast<double>(sonar.ranges.size());
    m.odometry_valid = odometry.has_value();
    m.distance = odometry.value_or(0.0);
    m.marker = camera;
    m.door_passed = door_passed;
    return m;
}

std::vector<std::size_t> detect_antigens(const SensorMetrics& m) {
    std::vector<std::size_t> out;
    if (m.z_min < kObjectRange) {
        if (m.r_min <= 2) {
            out.push_back(antigen::object_left);
        } else if (m.r_min <= 4) {
            out.push_back(antigen::object_centre);
        } else {
            out.push_back(antigen::object_right);
        }
    }
    out.push_back(m.z_av >= kAverageRangeThreshold ? antigen::open_space : antigen::cramped);
    if (m.odometry_valid && m.distance == 0.0) {
        out.push_back(antigen::stalled);
        if (m.e_av < kBlockedBehindRange) out.push_back(antigen::blocked_behind);
    }
    if (m.marker.visible) out.push_back(antigen::marker_seen);
    return out;
}

AntigenPresentation dominant_antigen(const std::vector<std::size_t>& antigens) {
    if (antigens.empty()) throw std::invalid_argument("dominant_antigen: no antigen presenting");
    std::size_t best = antigens.front();
    for (std::size_t a : antigens) {
        if (a >= kNumAntigens) throw StructuralError("antigen index out of range");
        if (priority(a) > priority(best) || (priority(a) == priority(best) && a < best)) best = a;
    }
    return AntigenPresentation::make(antigens, best);
}

MotionCommand action_for(std::size_t antibody, const SensorMetrics& m) {
    if (antibody >= kNumAntibodies) throw StructuralError("unknown antibody " + std::to_string(antibody));
    const AntibodyInfo& info = kAntibodies[antibody];
    switch (info.steering) {
        case Steering::fixed: return {info.angular_deg_s, info.linear_m_s};
        case Steering::toward_max: return {steer(m.z_max_angle_deg), info.linear_m_s};
        case Steering::away_from_min: return {steer(wrap_degrees(m.z_min_angle_deg + 180.0)), info.linear_m_s};
        case Steering::toward_marker:
            return {steer(m.marker.visible ? m.marker.bearing_deg : m.z_max_angle_deg), info.linear_m_s};
    }
    throw StructuralError("unhandled steering mode");
}

double score_outcome(const SensorMetrics& before, const SensorMetrics& after, std::size_t d,
                     const ScoringConfig& config) {
    if (d >= kNumAntigens) throw StructuralError("antigen index out of range");
    const std::size_t d_after = *dominant_antigen(detect_antigens(after)).dominant;
    const bool hazard_after = is_hazard(d_after);
    const bool stalled_after = after.odometry_valid && after.distance == 0.0;

    bool improved = after.door_passed;
    if (is_hazard(d)) {
        if (priority(d_after) < priority(d)) improved = true;
        switch (d) {
            case antigen::object_left:
            case antigen::object_centre:
            case antigen::object_right:
            case antigen::cramped:
                if (after.z_min > before.z_min && !stalled_after) improved = true;
                break;
            case antigen::stalled:
            case antigen::blocked_behind:
                if (after.distance > 0.0) improved = true;
                break;
            default: break;
        }
    } else if (d == antigen::marker_seen) {
        if (after.marker.visible && after.marker.distance < before.marker.distance &&
            after.distance >= config.progress_distance && !hazard_after) {
            improved = true;
        }
    } else {
        // Open space: full-speed travel that keeps its clearance.
        const bool clear = after.z_min >= before.z_min || after.z_min >= config.clear_range;
        if (after.distance >= config.progress_distance && !hazard_after && clear) improved = true;
    }
    return improved ? config.reward : -config.reward;
}

std::string behaviour_manifest() {
    std::string out = "# antigen <index> <priority> <name>\n";
    for (std::size_t i = 0; i < kNumAntigens; ++i) {
        out += "antigen " + std::to_string(i) + " " + std::to_string(kAntigens[i].priority) + " " +
               std::string(kAntigens[i].name) + "\n";
    }
    out += "# antibody <index> <angular deg/s | variable> <linear m/s> <name>\n";
    for (std::size_t i = 0; i < kNumAntibodies; ++i) {
        const AntibodyInfo& a = kAntibodies[i];
        const std::string angular = a.steering == Steering::fixed ? format_double(a.angular_deg_s) : "variable";
        out += "antibody " + std::to_string(i) + " " + angular + " " + format_double(a.linear_m_s) + " " +
               std::string(a.name) + "\n";
    }
    return out;
}

}  // namespace idiobot
