#include <doctest.h>

#include <cmath>
#include <numbers>

#include "microswim/errors.hpp"
#include "microswim/gait.hpp"
#include "microswim/rng.hpp"
#include "synthetic.hpp"

using namespace microswim;
using microswim::testing::joint_signal_trajectory;
using microswim::testing::lateral_field_trajectory;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST_SUITE("gait") {

TEST_CASE("steady window: constant velocity picks the latest window, unflagged") {
    auto traj = lateral_field_trajectory(4, 0.02, 9.0, 1e-3, 0.1,
                                         [](double, double) { return 0.0; });
    const SteadyWindow w = steady_window(traj, 2.0);
    CHECK(!w.fallback);
    CHECK(w.t_end == doctest::Approx(9.0).epsilon(1e-6));
}

TEST_CASE("steady window: constant acceleration falls back, flagged") {
    auto traj = lateral_field_trajectory(4, 0.02, 9.0, 1e-3, 0.0,
                                         [](double, double) { return 0.0; });
    for (std::size_t m = 0; m < traj.marker_count(); ++m)
        for (std::size_t k = 0; k < traj.frame_count(); ++k)
            traj.marker_x[m][k] += 0.05 * traj.time[k] * traj.time[k];
    const SteadyWindow w = steady_window(traj, 2.0);
    CHECK(w.fallback);
}

TEST_CASE("steady window: too-short trajectory is an error") {
    auto traj = lateral_field_trajectory(4, 0.02, 3.0, 1e-3, 0.1,
                                         [](double, double) { return 0.0; });
    CHECK_THROWS_AS(steady_window(traj, 2.0), DataError);
}

TEST_CASE("joint amplitudes and phases of a constructed gait") {
    std::vector<std::function<double(double)>> joints;
    for (int i = 0; i < 4; ++i)
        joints.push_back([i](double t) {
            return 0.2 * std::sin(kTwoPi * 3.0 * t - i * std::numbers::pi / 4.0);
        });
    const Trajectory traj = joint_signal_trajectory(10.0, 1e-3, joints);
    const SteadyWindow w = steady_window(traj, 3.0);
    const JointRhythm r = joint_amplitudes_phases(traj, w);
    CHECK(r.frequency == doctest::Approx(3.0).epsilon(2e-3));
    for (double m : r.amplitudes) CHECK(m == doctest::Approx(0.2).epsilon(0.01));
    for (double ip : r.phases)
        CHECK(ip == doctest::Approx(-std::numbers::pi / 4.0).epsilon(0.01));
}

TEST_CASE("identical joints give zero intersegmental phases") {
    std::vector<std::function<double(double)>> joints(3, [](double t) {
        return 0.1 * std::sin(kTwoPi * 2.0 * t);
    });
    const Trajectory traj = joint_signal_trajectory(10.0, 1e-3, joints);
    const JointRhythm r = joint_amplitudes_phases(traj, steady_window(traj, 3.0));
    for (double ip : r.phases) CHECK(std::abs(ip) < 1e-6);
}

TEST_CASE("amplitude estimate survives 20 dB noise within 3%") {
    Rng rng(99);
    // 20 dB power SNR: sigma = RMS(signal)/10
    const double snr_sigma = 0.25 / std::numbers::sqrt2 / 10.0;
    std::vector<std::function<double(double)>> joints;
    // noise via a deterministic pre-drawn buffer indexed by time
    static std::vector<double> noise;
    noise.clear();
    for (int k = 0; k < 20001; ++k) noise.push_back(rng.normal(0.0, snr_sigma));
    joints.push_back([](double t) {
        const std::size_t k = static_cast<std::size_t>(t * 2000.0);
        return 0.25 * std::sin(kTwoPi * 4.0 * t) + noise[k];
    });
    const Trajectory traj = joint_signal_trajectory(10.0, 5e-4, joints);
    const JointRhythm r = joint_amplitudes_phases(traj, steady_window(traj, 3.0));
    CHECK(r.amplitudes[0] == doctest::Approx(0.25).epsilon(0.03));
}

TEST_CASE("aperiodic joints are rejected") {
    std::vector<std::function<double(double)>> joints{[](double) { return 0.3; }};
    const Trajectory traj = joint_signal_trajectory(10.0, 1e-3, joints);
    CHECK_THROWS_AS(joint_amplitudes_phases(traj, steady_window(traj, 3.0)), AperiodicSignal);
}

TEST_CASE("undulatory velocity: rigid translation is zero") {
    auto traj = lateral_field_trajectory(8, 0.02, 9.0, 1e-3, 0.15,
                                         [](double, double) { return 0.003; });
    const SteadyWindow w = steady_window(traj, 2.0);
    CHECK(mean_bcf_undulatory_velocity(traj, w) == 0.0);
    CHECK(caudal_tip_velocity(traj, w) == 0.0);
}

TEST_CASE("traveling sinusoid field gives 4Af within 1%") {
    const double A = 0.01, f = 5.0;
    auto traj = lateral_field_trajectory(40, 0.005, 9.0, 2e-4, 0.2, [&](double x, double t) {
        return A * std::sin(40.0 * x - kTwoPi * f * t);
    });
    const SteadyWindow w = steady_window(traj, 2.0);
    const double v = mean_bcf_undulatory_velocity(traj, w);
    CHECK(v == doctest::Approx(4.0 * A * f).epsilon(0.01));
}

TEST_CASE("doubling the frequency doubles the undulatory velocity") {
    const double A = 0.01;
    auto make = [&](double f) {
        return lateral_field_trajectory(30, 0.006, 9.0, 2e-4, 0.1, [&](double x, double t) {
            return A * std::sin(30.0 * x - kTwoPi * f * t);
        });
    };
    auto t1 = make(3.0);
    auto t2 = make(6.0);
    const double v1 = mean_bcf_undulatory_velocity(t1, steady_window(t1, 2.0));
    const double v2 = mean_bcf_undulatory_velocity(t2, steady_window(t2, 2.0));
    CHECK(v2 == doctest::Approx(2.0 * v1).epsilon(0.01));
}

TEST_CASE("caudal tip velocity: oscillating tip gives 4Af") {
    const double A = 0.02, f = 5.0;
    auto traj = lateral_field_trajectory(6, 0.03, 9.0, 2e-4, 0.2, [&](double x, double t) {
        return x >= 0.149 ? A * std::sin(kTwoPi * f * t) : 0.0;
    });
    const SteadyWindow w = steady_window(traj, 2.0);
    CHECK(caudal_tip_velocity(traj, w) == doctest::Approx(4.0 * A * f).epsilon(0.01));
}

TEST_CASE("tip velocity equals body average when all markers coincide") {
    const double A = 0.005, f = 4.0;
    auto traj = lateral_field_trajectory(2, 0.0, 9.0, 5e-4, 0.1, [&](double, double t) {
        return A * std::sin(kTwoPi * f * t);
    });
    const SteadyWindow w = steady_window(traj, 2.0);
    CHECK(mean_bcf_undulatory_velocity(traj, w) ==
          doctest::Approx(caudal_tip_velocity(traj, w)).epsilon(1e-12));
}

TEST_CASE("wave index: standing, traveling, and the 50/50 superposition") {
    const double A = 0.01, k = 25.0, f = 3.0;
    auto standing = lateral_field_trajectory(12, 0.02, 9.0, 1e-3, 0.1, [&](double x, double t) {
        return A * std::sin(k * x) * std::cos(kTwoPi * f * t);
    });
    auto traveling = lateral_field_trajectory(12, 0.02, 9.0, 1e-3, 0.1, [&](double x, double t) {
        return A * std::sin(k * x - kTwoPi * f * t);
    });
    auto mixed = lateral_field_trajectory(12, 0.02, 9.0, 1e-3, 0.1, [&](double x, double t) {
        return A * std::sin(k * x) * std::cos(kTwoPi * f * t) +
               A * std::sin(k * x - kTwoPi * f * t);
    });
    const SteadyWindow w = steady_window(standing, 2.0);
    CHECK(wave_index(standing, w).index < 0.05);
    CHECK(wave_index(traveling, steady_window(traveling, 2.0)).index > 0.95);
    const double mixed_index = wave_index(mixed, steady_window(mixed, 2.0)).index;
    CHECK(mixed_index == doctest::Approx(0.5).epsilon(0.1));
    CHECK(std::abs(mixed_index - 0.5) < 0.05);
}

TEST_CASE("wave index stays in [0,1] and reports interior nodes") {
    const double A = 0.01, k = 40.0, f = 2.5;
    auto standing = lateral_field_trajectory(16, 0.015, 9.0, 1e-3, 0.05, [&](double x, double t) {
        return A * std::sin(k * x) * std::cos(kTwoPi * f * t);
    });
    const WaveDecomposition d = wave_index(standing, steady_window(standing, 2.0));
    CHECK(d.index >= 0.0);
    CHECK(d.index <= 1.0);
    CHECK(!d.node_positions.empty());  // sin(kx) has interior zeros in this span
}

TEST_CASE("wave index rejects a frozen body") {
    auto frozen = lateral_field_trajectory(8, 0.02, 9.0, 1e-3, 0.1,
                                           [](double, double) { return 0.001; });
    CHECK_THROWS_AS(wave_index(frozen, steady_window(frozen, 2.0)), AperiodicSignal);
}

TEST_CASE("metrics are invariant under lab-frame rotation and translation") {
    const double A = 0.008, k = 30.0, f = 4.0;
    auto traj = lateral_field_trajectory(10, 0.02, 9.0, 5e-4, 0.12, [&](double x, double t) {
        return A * std::sin(k * x - kTwoPi * f * t);
    });
    Trajectory rotated = traj;
    const double c = std::cos(0.83), s = std::sin(0.83);
    for (std::size_t m = 0; m < traj.marker_count(); ++m)
        for (std::size_t kk = 0; kk < traj.frame_count(); ++kk) {
            const double x = traj.marker_x[m][kk], y = traj.marker_y[m][kk];
            rotated.marker_x[m][kk] = c * x - s * y + 1.7;
            rotated.marker_y[m][kk] = s * x + c * y - 0.4;
        }
    const SteadyWindow w1 = steady_window(traj, 2.0);
    const SteadyWindow w2 = steady_window(rotated, 2.0);
    CHECK(mean_bcf_undulatory_velocity(rotated, w2) ==
          doctest::Approx(mean_bcf_undulatory_velocity(traj, w1)).epsilon(1e-9));
    CHECK(caudal_tip_velocity(rotated, w2) ==
          doctest::Approx(caudal_tip_velocity(traj, w1)).epsilon(1e-9));
    CHECK(wave_index(rotated, w2).index ==
          doctest::Approx(wave_index(traj, w1).index).epsilon(1e-6));
    CHECK(window_speed(rotated, w2.begin_frame, w2.end_frame) ==
          doctest::Approx(window_speed(traj, w1.begin_frame, w1.end_frame)).epsilon(1e-9));
}

TEST_CASE("time rescaling doubles rates and leaves shapes alone") {
    const double A = 0.008, k = 30.0, f = 2.0;
    auto field = [&](double x, double t) { return A * std::sin(k * x - kTwoPi * f * t); };
    auto slow = lateral_field_trajectory(10, 0.02, 9.0, 1e-3, 0.1, field);
    // same samples played twice as fast
    Trajectory fast = slow;
    fast.sample_dt = slow.sample_dt / 2.0;
    for (auto& t : fast.time) t /= 2.0;

    const SteadyWindow ws = steady_window(slow, 2.0);
    const SteadyWindow wf = steady_window(fast, 1.0);
    CHECK(mean_bcf_undulatory_velocity(fast, wf) ==
          doctest::Approx(2.0 * mean_bcf_undulatory_velocity(slow, ws)).epsilon(0.02));
    CHECK(caudal_tip_velocity(fast, wf) ==
          doctest::Approx(2.0 * caudal_tip_velocity(slow, ws)).epsilon(0.02));
    CHECK(wave_index(fast, wf).index ==
          doctest::Approx(wave_index(slow, ws).index).epsilon(0.05));
}

}  // TEST_SUITE
