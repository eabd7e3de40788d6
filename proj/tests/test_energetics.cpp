#include <doctest.h>

#include <cmath>
#include <numbers>

#include "microswim/energetics.hpp"
#include "microswim/errors.hpp"
#include "synthetic.hpp"

using namespace microswim;
using microswim::testing::joint_signal_trajectory;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// One joint driven at frequency f with angle Th*sin(wt) and torque
/// T*sin(wt + lead).
Trajectory loop_trajectory(double T, double Th, double f, double lead,
                           double samples_per_cycle = 1000.0, double cycles = 8.0) {
    const double dt = 1.0 / (f * samples_per_cycle);
    const double duration = cycles / f;
    return joint_signal_trajectory(
        duration, dt,
        {[=](double t) { return Th * std::sin(kTwoPi * f * t); }},
        {[=](double t) { return T * std::sin(kTwoPi * f * t + lead); }});
}

SteadyWindow whole_window(const Trajectory& t) {
    SteadyWindow w;
    w.begin_frame = 0;
    w.end_frame = t.frame_count() - 1;
    w.t_begin = t.time.front();
    w.t_end = t.time.back();
    return w;
}

}  // namespace

TEST_SUITE("energetics") {

TEST_CASE("in-phase torque encloses zero area but has positive slope") {
    // tau = c * theta throughout
    const double Th = 0.3, c = 0.02, f = 4.0;
    auto traj = joint_signal_trajectory(
        2.0, 1e-3, {[=](double t) { return Th * std::sin(kTwoPi * f * t); }},
        {[=](double t) { return c * Th * std::sin(kTwoPi * f * t); }});
    const WorkLoop loop = work_loop(traj, 0, whole_window(traj));
    CHECK(std::abs(loop.net_work) < 1e-9);
    CHECK(loop.inclination == doctest::Approx(c).epsilon(1e-3));
}

TEST_CASE("quarter-cycle lead encloses pi*T*Theta per cycle within 0.1%") {
    const double T = 0.004, Th = 0.25, f = 5.0;
    auto traj = loop_trajectory(T, Th, f, std::numbers::pi / 2.0);
    const WorkLoop loop = work_loop(traj, 0, whole_window(traj));
    CHECK(loop.net_work ==
          doctest::Approx(std::numbers::pi * T * Th).epsilon(1e-3));
    CHECK(loop.normalized_area == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(loop.classification == ActuatorClass::Motor);
}

TEST_CASE("reversing time negates the enclosed work") {
    const double T = 0.004, Th = 0.25, f = 5.0;
    auto traj = loop_trajectory(T, Th, f, std::numbers::pi / 2.0);
    Trajectory reversed = traj;
    for (auto& ch : reversed.joint_angles) std::reverse(ch.begin(), ch.end());
    for (auto& ch : reversed.joint_torques) std::reverse(ch.begin(), ch.end());
    const WorkLoop fwd = work_loop(traj, 0, whole_window(traj));
    const WorkLoop bwd = work_loop(reversed, 0, whole_window(reversed));
    CHECK(bwd.net_work == doctest::Approx(-fwd.net_work).epsilon(1e-6));
}

TEST_CASE("loop is invariant to the cycle starting phase") {
    const double T = 0.003, Th = 0.2, f = 4.0;
    auto traj = loop_trajectory(T, Th, f, 1.1);
    const std::size_t shift = 137;  // an arbitrary intra-cycle offset
    Trajectory shifted = traj;
    auto rotate = [&](std::vector<double>& ch) {
        std::rotate(ch.begin(), ch.begin() + shift, ch.end());
    };
    rotate(shifted.joint_angles[0]);
    rotate(shifted.joint_torques[0]);
    const WorkLoop a = work_loop(traj, 0, whole_window(traj));
    const WorkLoop b = work_loop(shifted, 0, whole_window(shifted));
    CHECK(a.net_work == doctest::Approx(b.net_work).epsilon(5e-3));
}

TEST_CASE("classification truth table on constructed loops") {
    const double f = 4.0;
    SUBCASE("90 degree lead, maximal area: motor") {
        auto traj = loop_trajectory(0.004, 0.25, f, std::numbers::pi / 2.0);
        CHECK(work_loop(traj, 0, whole_window(traj)).classification == ActuatorClass::Motor);
    }
    SUBCASE("90 degree lag: brake") {
        auto traj = loop_trajectory(0.004, 0.25, f, -std::numbers::pi / 2.0);
        CHECK(work_loop(traj, 0, whole_window(traj)).classification == ActuatorClass::Brake);
    }
    SUBCASE("restoring line with small noise: virtual spring") {
        auto traj = joint_signal_trajectory(
            2.0, 1e-3, {[=](double t) { return 0.25 * std::sin(kTwoPi * f * t); }},
            {[=](double t) {
                return -0.02 * 0.25 * std::sin(kTwoPi * f * t) +
                       1e-4 * std::sin(kTwoPi * f * t + 0.3);
            }});
        CHECK(work_loop(traj, 0, whole_window(traj)).classification ==
              ActuatorClass::VirtualSpring);
    }
    SUBCASE("anti-restoring line with small noise: virtual mass") {
        auto traj = joint_signal_trajectory(
            2.0, 1e-3, {[=](double t) { return 0.25 * std::sin(kTwoPi * f * t); }},
            {[=](double t) {
                return 0.02 * 0.25 * std::sin(kTwoPi * f * t) +
                       1e-4 * std::sin(kTwoPi * f * t + 0.3);
            }});
        CHECK(work_loop(traj, 0, whole_window(traj)).classification ==
              ActuatorClass::VirtualMass);
    }
}

TEST_CASE("classification is invariant to common positive rescaling") {
    const double f = 4.0;
    auto traj = loop_trajectory(0.004, 0.25, f, 0.2);
    WorkLoop loop = work_loop(traj, 0, whole_window(traj));
    WorkLoop scaled = loop;
    for (auto& a : scaled.angle) a *= 7.0;
    for (auto& t : scaled.torque) t *= 3.0;
    scaled.net_work *= 21.0;
    scaled.inclination *= 3.0 / 7.0;
    // normalized area is already dimensionless and unchanged
    CHECK(classify_actuator(scaled) == classify_actuator(loop));
}

TEST_CASE("zero-amplitude loop is unclassifiable") {
    WorkLoop flat;
    flat.angle.assign(100, 0.0);
    flat.torque.assign(100, 0.0);
    CHECK_THROWS_AS(classify_actuator(flat), DataError);
}

TEST_CASE("mean power equals sum of loop work times frequency within 1%") {
    const double f = 5.0;
    std::vector<std::function<double(double)>> angles, torques;
    for (int j = 0; j < 3; ++j) {
        const double Th = 0.1 + 0.05 * j, T = 0.002 + 0.001 * j, lead = 0.4 + 0.5 * j;
        angles.push_back([=](double t) { return Th * std::sin(kTwoPi * f * t - 0.3 * j); });
        torques.push_back(
            [=](double t) { return T * std::sin(kTwoPi * f * t - 0.3 * j + lead); });
    }
    // integer number of cycles
    auto traj = joint_signal_trajectory(6.0 / f * 5.0, 1.0 / (f * 1000.0), angles, torques);
    const SteadyWindow w = whole_window(traj);
    const double power = mean_total_power(traj, w);
    double from_loops = 0.0;
    for (std::size_t j = 0; j < 3; ++j)
        from_loops += work_loop(traj, j, w).net_work * work_loop(traj, j, w).frequency;
    CHECK(power == doctest::Approx(from_loops).epsilon(0.01));
}

TEST_CASE("doubling the torque channel doubles the power") {
    const double f = 4.0;
    auto traj = loop_trajectory(0.004, 0.25, f, 0.9);
    const double p1 = mean_total_power(traj, whole_window(traj));
    for (auto& v : traj.joint_torques[0]) v *= 2.0;
    CHECK(mean_total_power(traj, whole_window(traj)) == doctest::Approx(2.0 * p1).epsilon(1e-12));
}

TEST_CASE("zero torque means zero power") {
    auto traj = joint_signal_trajectory(
        2.0, 1e-3, {[](double t) { return 0.2 * std::sin(kTwoPi * 3.0 * t); }},
        {[](double) { return 0.0; }});
    CHECK(mean_total_power(traj, whole_window(traj)) == 0.0);
}

TEST_CASE("cost of transport arithmetic and reference magnitudes") {
    const CostOfTransport c = cost_of_transport(0.2, 2.0, 1.0);
    CHECK(c.cot_net == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(c.cot_w_net == doctest::Approx(0.1).epsilon(1e-15));

    // mass-normalized value for the largest catalog design
    const CostOfTransport big = cost_of_transport(0.1014 * 1.0, 1.0, 0.078);
    CHECK(big.cot_net == doctest::Approx(0.1014).epsilon(1e-12));
    CHECK(big.cot_w_net == doctest::Approx(1.3).epsilon(1e-3));

    CHECK_THROWS_AS(cost_of_transport(0.1, 0.0, 1.0), DataError);
    CHECK_THROWS_AS(cost_of_transport(0.1, 1.0, 0.0), DataError);
}

TEST_CASE("missing torque channel is an error") {
    auto traj = joint_signal_trajectory(
        2.0, 1e-3, {[](double t) { return 0.2 * std::sin(kTwoPi * 3.0 * t); }});
    CHECK_THROWS_AS(work_loop(traj, 0, whole_window(traj)), DataError);
    CHECK_THROWS_AS(mean_total_power(traj, whole_window(traj)), DataError);
}

}  // TEST_SUITE
