#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "idiobot/behaviors.hpp"
#include "idiobot/random.hpp"

using namespace idiobot;

namespace {

LaserScan flat_scan(double r) {
    LaserScan s;
    s.ranges.assign(181, r);
    return s;
}

SonarReadings flat_sonar(double r) { return SonarReadings{std::vector<double>(8, r)}; }

SensorMetrics metrics(double z_min, int r_min, double z_av, std::optional<double> distance, double e_av = 2.0) {
    SensorMetrics m;
    m.z_min = z_min;
    m.r_min = r_min;
    m.z_av = z_av;
    m.z_max = std::max(z_av, z_min);
    m.e_av = e_av;
    m.odometry_valid = distance.has_value();
    m.distance = distance.value_or(0.0);
    return m;
}

bool has(const std::vector<std::size_t>& v, std::size_t a) { return std::find(v.begin(), v.end(), a) != v.end(); }

SensorMetrics random_metrics(Rng& rng) {
    SensorMetrics m;
    m.z_min = rng.uniform(0.001, 3.0);
    m.z_av = rng.uniform(m.z_min, 6.0);
    m.z_max = rng.uniform(m.z_av, 8.0);
    m.r_min = 1 + static_cast<int>(rng.index(6));
    m.z_min_angle_deg = rng.uniform(-90.0, 90.0);
    m.z_max_angle_deg = rng.uniform(-90.0, 90.0);
    m.e_av = rng.uniform(0.001, 5.0);
    m.odometry_valid = rng.uniform() < 0.9;
    m.distance = m.odometry_valid && rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.0, 1.0);
    m.marker.visible = rng.uniform() < 0.3;
    m.marker.distance = rng.uniform(0.1, 5.0);
    m.marker.bearing_deg = rng.uniform(-30.0, 30.0);
    m.door_passed = rng.uniform() < 0.05;
    return m;
}

}  // namespace

TEST_CASE("metrics from a uniform scan") {
    const SensorMetrics m = compute_metrics(flat_scan(2.0), flat_sonar(0.2), 0.3, BlobDetection{});
    CHECK(m.z_min == 2.0);
    CHECK(m.z_av == 2.0);
    CHECK(m.z_max == 2.0);
    CHECK(m.e_av == doctest::Approx(0.2));
    CHECK(m.distance == 0.3);
    CHECK(m.odometry_valid);
    CHECK(m.z_max_angle_deg == 0.0);
}

TEST_CASE("minimal ray at -45 degrees of scan bearing is subsector 2") {
    LaserScan s = flat_scan(3.0);
    s.ranges[45] = 0.4;
    REQUIRE(s.scan_bearing(45) == doctest::Approx(-45.0));
    const SensorMetrics m = compute_metrics(s, flat_sonar(1.0), std::nullopt, BlobDetection{});
    CHECK(m.r_min == 2);
    CHECK(m.z_min == 0.4);
    CHECK(m.z_min_angle_deg == doctest::Approx(45.0));
    CHECK_FALSE(m.odometry_valid);
}

TEST_CASE("antigen detection examples") {
    auto a = detect_antigens(metrics(0.4, 3, 0.6, 0.5));
    CHECK(a == std::vector<std::size_t>{antigen::object_centre, antigen::open_space});

    a = detect_antigens(metrics(1.0, 3, 0.4, 0.0, 0.3));
    CHECK(a == std::vector<std::size_t>{antigen::cramped, antigen::stalled, antigen::blocked_behind});

    a = detect_antigens(metrics(0.3, 6, 0.4, 0.0, 0.3));
    CHECK(a == std::vector<std::size_t>{antigen::object_right, antigen::cramped, antigen::stalled,
                                        antigen::blocked_behind});

    CHECK(detect_antigens(metrics(2.0, 3, 3.0, 0.8)) == std::vector<std::size_t>{antigen::open_space});

    // no stall before the first interval has elapsed
    CHECK(detect_antigens(metrics(2.0, 3, 3.0, std::nullopt)) == std::vector<std::size_t>{antigen::open_space});

    SensorMetrics seen = metrics(2.0, 3, 3.0, 0.8);
    seen.marker.visible = true;
    CHECK(detect_antigens(seen) == std::vector<std::size_t>{antigen::open_space, antigen::marker_seen});
}

TEST_CASE("dominant antigen by priority") {
    CHECK(dominant_antigen({1, 4, 5}).dominant == 5u);
    CHECK(dominant_antigen({3}).dominant == 3u);
    CHECK(dominant_antigen({5, 6}).dominant == 6u);
    CHECK(dominant_antigen({3, 7}).dominant == 7u);
    CHECK_THROWS(dominant_antigen({}));
}

TEST_CASE("detection covers every situation exactly once") {
    Rng rng(41);
    for (int k = 0; k < 100000; ++k) {
        const SensorMetrics m = random_metrics(rng);
        const auto a = detect_antigens(m);
        REQUIRE_FALSE(a.empty());
        CHECK(has(a, antigen::open_space) != has(a, antigen::cramped));
        const int objects = has(a, antigen::object_left) + has(a, antigen::object_centre) + has(a, antigen::object_right);
        CHECK(objects <= 1);
        CHECK(std::is_sorted(a.begin(), a.end()));

        const auto pres = dominant_antigen(a);
        const int top = kAntigens[*pres.dominant].priority;
        int at_top = 0;
        for (std::size_t x : a) {
            CHECK(kAntigens[x].priority <= top);
            if (kAntigens[x].priority == top) ++at_top;
        }
        CHECK(at_top == 1);
    }
}

TEST_CASE("fixed antibodies reproduce the transcribed action table exactly") {
    std::ifstream in(IDIOBOT_TABLES_FILE);
    REQUIRE(in);
    std::string line;
    int checked = 0;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string kind, angular;
        std::size_t i = 0;
        double linear = 0.0;
        if (!(ss >> kind) || kind != "antibody") continue;
        ss >> i >> angular >> linear;
        const MotionCommand cmd = action_for(i, SensorMetrics{});
        CHECK(cmd.linear_m_s == linear);
        if (angular != "variable") {
            CHECK(kAntibodies[i].steering == Steering::fixed);
            CHECK(cmd.angular_deg_s == std::stod(angular));
        } else {
            CHECK(kAntibodies[i].steering != Steering::fixed);
        }
        ++checked;
    }
    CHECK(checked == 16);
}

TEST_CASE("action examples") {
    CHECK(action_for(6, SensorMetrics{}) == MotionCommand{-35.0, 0.06});
    CHECK(action_for(3, SensorMetrics{}) == MotionCommand{0.0, 1.0});
    CHECK_THROWS_AS(action_for(16, SensorMetrics{}), StructuralError);

    SensorMetrics m;
    m.marker.visible = true;
    m.marker.bearing_deg = 20.0;
    const MotionCommand track = action_for(13, m);
    CHECK(track.angular_deg_s == doctest::Approx(kSteeringGain * 20.0));
    CHECK(track.linear_m_s == 2.0);

    m.marker.bearing_deg = 80.0;
    CHECK(action_for(13, m).angular_deg_s == kMaxSteeringRate);
}

TEST_CASE("wandering antibodies steer toward space") {
    SensorMetrics m;
    m.z_max_angle_deg = -30.0;
    m.z_min_angle_deg = 40.0;
    CHECK(action_for(11, m).angular_deg_s == doctest::Approx(-45.0));
    CHECK(action_for(11, m).linear_m_s == 2.0);
    // away from the closest obstacle: 40 + 180 wraps to -140, saturated
    CHECK(action_for(12, m).angular_deg_s == -kMaxSteeringRate);
    // without a marker, tracking falls back to the longest ray
    CHECK(action_for(13, m).angular_deg_s == doctest::Approx(-45.0));
}

TEST_CASE("scoring examples") {
    const SensorMetrics stalled = metrics(1.0, 3, 1.0, 0.0);
    const SensorMetrics moving = metrics(1.0, 3, 1.0, 0.2);
    CHECK(score_outcome(stalled, moving, antigen::stalled) == 0.05);

    const SensorMetrics close = metrics(0.4, 3, 1.0, 0.1);
    const SensorMetrics closer = metrics(0.3, 3, 1.0, 0.1);
    CHECK(score_outcome(close, closer, antigen::object_centre) == -0.05);
    CHECK(score_outcome(closer, close, antigen::object_centre) == 0.05);

    CHECK(score_outcome(close, close, antigen::object_centre) == -0.05);
    CHECK(score_outcome(stalled, stalled, antigen::stalled) == -0.05);
    const SensorMetrics dawdle = metrics(2.0, 3, 3.0, 0.1);
    CHECK(score_outcome(dawdle, dawdle, antigen::open_space) == -0.05);
}

TEST_CASE("scoring: hazards resolved, open-space travel, marker approach") {
    // object cleared
    CHECK(score_outcome(metrics(0.4, 1, 1.0, 0.1), metrics(0.8, 3, 1.0, 0.1), antigen::object_left) == 0.05);
    // blocked behind resolved by moving
    CHECK(score_outcome(metrics(1.0, 3, 1.0, 0.0, 0.2), metrics(1.0, 3, 1.0, 0.05, 0.2), antigen::blocked_behind) ==
          0.05);
    // clearance grew but the robot is stuck against something
    CHECK(score_outcome(metrics(0.3, 3, 1.0, 0.1), metrics(0.35, 3, 1.0, 0.0), antigen::object_centre) == -0.05);

    // fast travel that keeps its clearance
    CHECK(score_outcome(metrics(2.0, 3, 3.0, 0.8), metrics(2.0, 3, 3.0, 0.8), antigen::open_space) == 0.05);
    // fast travel straight into an obstacle
    CHECK(score_outcome(metrics(2.0, 3, 3.0, 0.8), metrics(0.4, 3, 3.0, 0.8), antigen::open_space) == -0.05);

    SensorMetrics far = metrics(2.0, 3, 3.0, 0.8);
    far.marker = {true, 5.0, 3.0, 1};
    SensorMetrics nearer = far;
    nearer.marker.distance = 2.0;
    CHECK(score_outcome(far, nearer, antigen::marker_seen) == 0.05);
    CHECK(score_outcome(nearer, far, antigen::marker_seen) == -0.05);

    SensorMetrics through = metrics(0.4, 3, 0.4, 0.1);
    through.door_passed = true;
    CHECK(score_outcome(metrics(0.4, 3, 0.4, 0.1), through, antigen::object_centre) == 0.05);
}

TEST_CASE("every verdict has magnitude 0.05") {
    Rng rng(42);
    for (int k = 0; k < 100000; ++k) {
        const SensorMetrics before = random_metrics(rng);
        const SensorMetrics after = random_metrics(rng);
        const auto d = *dominant_antigen(detect_antigens(before)).dominant;
        CHECK(std::abs(score_outcome(before, after, d)) == 0.05);
    }
    ScoringConfig c;
    c.reward = 0.1;
    CHECK(score_outcome(metrics(1.0, 3, 1.0, 0.0), metrics(1.0, 3, 1.0, 0.2), antigen::stalled, c) == 0.1);
}

TEST_CASE("manifest lists every antigen and antibody") {
    const std::string text = behaviour_manifest();
    for (const auto& a : kAntigens) CHECK(text.find(a.name) != std::string::npos);
    for (const auto& b : kAntibodies) CHECK(text.find(b.name) != std::string::npos);
}
