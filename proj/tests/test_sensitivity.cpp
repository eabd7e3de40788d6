#include <doctest.h>

#include <cmath>
#include <numbers>

#include "microswim/errors.hpp"
#include "microswim/sensitivity.hpp"
#include "synthetic.hpp"

using namespace microswim;

TEST_SUITE("sensitivity") {

TEST_CASE("disruption set matches the design's dof") {
    const auto set2 = disruption_set(2, 0.2, 0.4, 0.2);
    REQUIRE(set2.size() == 5);
    CHECK(set2[0].label() == "in1");
    CHECK(set2[1].label() == "in2");
    CHECK(set2[2].label() == "p1");
    CHECK(set2[3].label() == "f+");
    CHECK(set2[4].label() == "f-");
    CHECK(disruption_set(6, 0.2, 0.4, 0.2).size() == 6 + 5 + 2);
}

TEST_CASE("zero magnitude violates the invariant") {
    DisruptionSpec s{DisruptionKind::Intensity, 0, 0.0};
    CHECK_THROWS_AS(s.validate(4), DataError);
    DisruptionSpec bad_target{DisruptionKind::Intensity, 7, 0.2};
    CHECK_THROWS_AS(bad_target.validate(4), DataError);
    DisruptionSpec bad_pair{DisruptionKind::IntersegmentalPhase, 3, 0.2};
    CHECK_THROWS_AS(bad_pair.validate(4), DataError);
}

TEST_CASE("intensity disruption scales exactly one channel") {
    std::vector<std::vector<double>> ch(3, std::vector<double>(2001));
    const double rate = 1000.0;
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t k = 0; k < ch[c].size(); ++k)
            ch[c][k] = std::sin(2.0 * std::numbers::pi * 4.0 * k / rate + 0.3 * c);
    const VoltageSignal nominal(ch, rate);
    const VoltageSignal bumped =
        apply_disruption(nominal, {DisruptionKind::Intensity, 1, 0.2}, 4.0);
    for (double t : {0.1, 0.57, 1.3}) {
        CHECK(bumped.value(0, t) == nominal.value(0, t));
        CHECK(bumped.value(1, t) == doctest::Approx(1.2 * nominal.value(1, t)).epsilon(1e-12));
        CHECK(bumped.value(2, t) == nominal.value(2, t));
    }
}

TEST_CASE("phase disruption delays only downstream channels") {
    std::vector<std::vector<double>> ch(3, std::vector<double>(4001));
    const double rate = 1000.0, f = 2.0;
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t k = 0; k < ch[c].size(); ++k)
            ch[c][k] = std::sin(2.0 * std::numbers::pi * f * k / rate);
    const VoltageSignal nominal(ch, rate);
    const double mag = std::numbers::pi / 4.0;
    const VoltageSignal shifted =
        apply_disruption(nominal, {DisruptionKind::IntersegmentalPhase, 0, mag}, f);
    const double delay = mag / (2.0 * std::numbers::pi * f);
    for (double t : {1.0, 1.3, 1.71}) {
        CHECK(shifted.value(0, t) == nominal.value(0, t));
        CHECK(shifted.value(1, t) == doctest::Approx(nominal.value(1, t - delay)).epsilon(1e-9));
        CHECK(shifted.value(2, t) == doctest::Approx(nominal.value(2, t - delay)).epsilon(1e-9));
    }
}

TEST_CASE("frequency disruption rescales the measured rhythm") {
    const CpgParams p = [=] {
        CpgParams q = CpgParams::defaults(2);
        q.tau = calibrate_tau(q, 5.0);
        return q;
    }();
    VoltageSignal nominal = VoltageSignal::from_cpg(p, 12.0, p.tau / 20.0,
                                                    CpgState::zero(2), 1.0);
    const VoltageSignal faster =
        apply_disruption(nominal, {DisruptionKind::FrequencyUp, 0, 0.2}, 5.0);
    // sample the transformed signal and measure it
    SignalTrace tr;
    tr.sample_rate = 1000.0;
    tr.outputs.assign(2, {});
    for (double t = 2.0; t < 9.0; t += 1e-3) {
        tr.outputs[0].push_back(faster.value(0, t));
        tr.outputs[1].push_back(faster.value(1, t));
    }
    const SignalMetrics m = signal_metrics(tr);
    CHECK(m.frequency == doctest::Approx(6.0).epsilon(0.01));
}

TEST_CASE("sensitivity index: identity, unit response, phase handling, flags") {
    CHECK(sensitivity_index(0.5, 0.5, 0.2).value == 0.0);
    // output changes by the same relative amount as the input
    CHECK(sensitivity_index(0.5, 0.6, 0.2).value == doctest::Approx(1.0).epsilon(1e-12));
    // phase outputs are normalized by a full turn and wrapped
    const double s = sensitivity_index(0.1, 0.1 + std::numbers::pi / 2.0, 0.25, true).value;
    CHECK(s == doctest::Approx((0.25) / 0.25).epsilon(1e-12));
    const SensitivityValue abs_var = sensitivity_index(0.0, 0.3, 0.2);
    CHECK(abs_var.absolute_variant);
    CHECK(abs_var.value == doctest::Approx(1.5).epsilon(1e-12));
    CHECK_THROWS_AS(sensitivity_index(1.0, 1.1, 0.0), DataError);
}

TEST_CASE("matrix shape follows the dof formula and repeats are clean") {
    const RobotDesign d = standard_design(2, true);
    CpgParams nominal = CpgParams::defaults(2);
    nominal.tau = calibrate_tau(nominal, 4.0);
    SensitivityConfig cfg;
    cfg.sim_duration = 7.0;
    cfg.sim_dt = 1e-3;
    cfg.metrics_window = 1.5;
    SimConfig sim;
    sim.cpg_init_noise = 0.0;  // deterministic environment: identical repeats
    const SensitivityReport r =
        sensitivity_matrix(d, nominal, GaitRegime::StandingWave, 3, 5, cfg, sim);
    const std::size_t n = 2;
    CHECK(r.row_labels.size() == 2 + n + (n - 1));
    CHECK(r.col_labels.size() == n + (n - 1) + 2);
    CHECK(r.col_labels == std::vector<std::string>{"in1", "in2", "p1", "f+", "f-"});
    CHECK(r.row_labels.front() == "spd");
    for (const auto& row : r.stddev)
        for (double v : row) CHECK(v == 0.0);
    for (const auto& row : r.valid)
        for (bool ok : row) CHECK(ok);
    for (const auto& row : r.mean)
        for (double v : row) CHECK(v >= 0.0);
    CHECK(r.display_clamp == 1.5);
}

TEST_CASE("small-perturbation symmetry of the index") {
    // For a smooth scalar map, +/- 5% input disruptions give indices that
    // agree within 25%.
    auto output = [](double gain) { return 0.8 * gain * gain + 0.2 * gain; };  // smooth
    const double nominal = output(1.0);
    const double up = output(1.05), down = output(0.95);
    const double s_up = sensitivity_index(nominal, up, 0.05).value;
    const double s_down = sensitivity_index(nominal, down, -0.05).value;
    CHECK(std::abs(s_up - s_down) / std::max(s_up, s_down) < 0.25);
}

}  // TEST_SUITE
