#include <doctest.h>

#include <cmath>
#include <numbers>

#include "microswim/cpg.hpp"
#include "microswim/errors.hpp"
#include "synthetic.hpp"

using namespace microswim;

TEST_SUITE("cpg") {

TEST_CASE("zero stimulus keeps the origin fixed, exactly") {
    CpgParams p = CpgParams::defaults(3);
    p.stimulus.assign(3, 0.0);
    CpgState s = CpgState::zero(3);
    for (int k = 0; k < 100; ++k) s = cpg_step(s, p, p.tau / 20.0, k);
    for (double u : s.u) CHECK(u == 0.0);
    for (double v : s.v) CHECK(v == 0.0);

    SignalTrace trace = cpg_run(p, 1.0, p.tau / 20.0, CpgState::zero(3));
    for (const auto& ch : trace.outputs)
        for (double y : ch) CHECK(y == 0.0);
}

TEST_CASE("swapping neuron columns negates the output exactly") {
    CpgParams p = CpgParams::defaults(2);
    CpgState a = CpgState::zero(2);
    a.u_at(0, 0) = 0.3;
    a.u_at(1, 1) = -0.2;
    a.v_at(0, 0) = 0.05;
    CpgState b = CpgState::zero(2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            b.u_at(i, j) = a.u_at(i, 1 - j);
            b.v_at(i, j) = a.v_at(i, 1 - j);
        }
    const double dt = p.tau / 20.0;
    for (int k = 0; k < 2000; ++k) {
        a = cpg_step(a, p, dt, k);
        b = cpg_step(b, p, dt, k);
        for (std::size_t i = 0; i < 2; ++i) {
            const double ya = cpg_output(a.u_at(i, 0), a.u_at(i, 1));
            const double yb = cpg_output(b.u_at(i, 0), b.u_at(i, 1));
            CHECK(ya == -yb);
        }
    }
}

TEST_CASE("fine-step refinement: dt=1e-4 vs 5e-5 agree after 10 s") {
    CpgParams p = CpgParams::defaults(2);
    auto final_output = [&](double dt) {
        CpgState s = CpgState::zero(2);
        s.u_at(0, 0) = 1e-6;
        CpgIntegrator integ(p, s);
        const long steps = static_cast<long>(std::llround(10.0 / dt));
        for (long k = 0; k < steps; ++k) integ.advance(dt);
        return integ.output(1);
    };
    const double coarse = final_output(1e-4);
    const double fine = final_output(5e-5);
    // amplitude of the default cycle is ~0.7
    CHECK(std::abs(coarse - fine) < 1e-4 * 0.7);
}

TEST_CASE("bounded states over a long run") {
    CpgParams p = CpgParams::defaults(4);
    CpgState s = CpgState::zero(4);
    s.u_at(0, 0) = 1e-6;
    CpgIntegrator integ(p, s);
    const double dt = p.tau / 10.0;
    double u_max = 0.0;
    for (long k = 0; k < static_cast<long>(100.0 / dt); ++k) {
        integ.advance(dt);
        for (double u : integ.state().u) u_max = std::max(u_max, std::abs(u));
    }
    CHECK(u_max < 10.0);
}

TEST_CASE("limit cycle settles and stimulus scales amplitude monotonically") {
    CpgParams p = CpgParams::defaults(3);
    auto steady_amp = [&](double e) {
        CpgParams q = p;
        q.stimulus.assign(3, e);
        SignalTrace tr = cpg_run(q, 8.0, q.tau / 20.0, CpgState::zero(3));
        const auto& y = tr.outputs.back();
        // peak amplitude per cycle over the last half must be stable
        const std::size_t half = y.size() / 2;
        double peak = 0.0;
        for (std::size_t k = half; k < y.size(); ++k) peak = std::max(peak, std::abs(y[k]));
        return peak;
    };
    const double a1 = steady_amp(1.0);
    const double a2 = steady_amp(2.0);
    CHECK(a1 > 0.1);
    CHECK(a2 > a1);

    // cycle-to-cycle peak variation < 1% in the last half of a long run
    SignalTrace tr = cpg_run(p, 10.0, p.tau / 20.0, CpgState::zero(3));
    const auto& y = tr.outputs.back();
    const double f = testing::zero_crossing_frequency(
        std::vector<double>(y.begin() + static_cast<long>(y.size() / 2), y.end()),
        tr.sample_rate);
    const std::size_t per_cycle = static_cast<std::size_t>(tr.sample_rate / f);
    std::vector<double> peaks;
    for (std::size_t start = y.size() / 2; start + per_cycle <= y.size(); start += per_cycle) {
        double pk = 0.0;
        for (std::size_t k = start; k < start + per_cycle; ++k) pk = std::max(pk, std::abs(y[k]));
        peaks.push_back(pk);
    }
    REQUIRE(peaks.size() >= 5);
    const auto [mn, mx] = std::minmax_element(peaks.begin(), peaks.end());
    CHECK((*mx - *mn) / *mx < 0.01);
}

TEST_CASE("spectral frequency matches the zero-crossing oracle within 1%") {
    CpgParams p = CpgParams::defaults(4);
    SignalMetrics m = measure_cpg(p);
    SignalTrace tr = cpg_run(p, 12.0, p.tau / 50.0, CpgState::zero(4));
    const auto& y = tr.outputs.back();
    std::vector<double> tail(y.begin() + static_cast<long>(y.size() / 2), y.end());
    const double f_zc = testing::zero_crossing_frequency(tail, tr.sample_rate);
    REQUIRE(f_zc > 0.0);
    CHECK(std::abs(m.frequency - f_zc) / f_zc < 0.01);
}

TEST_CASE("frequency is strictly decreasing in tau") {
    CpgParams p = CpgParams::defaults(2);
    double prev = 1e9;
    for (int k = 0; k < 10; ++k) {
        p.tau = 0.01 * std::pow(10.0, k / 9.0);  // 0.01 .. 0.1
        const double f = measure_cpg(p).frequency;
        CHECK(f < prev);
        prev = f;
    }
}

TEST_CASE("halving dt changes the measured frequency by < 0.1%") {
    CpgParams p = CpgParams::defaults(2);
    const double f1 = measure_cpg(p, p.tau / 20.0).frequency;
    const double f2 = measure_cpg(p, p.tau / 40.0).frequency;
    CHECK(std::abs(f1 - f2) / f2 < 1e-3);
}

TEST_CASE("calibrate_tau: fixed point, scaling law, band and errors") {
    CpgParams p = CpgParams::defaults(4);
    const double f0 = measure_cpg(p).frequency;

    SUBCASE("target already produced returns the current tau") {
        const double tau = calibrate_tau(p, f0);
        CHECK(std::abs(tau - p.tau) / p.tau < 0.02);
    }
    SUBCASE("halving tau roughly doubles the frequency") {
        const double tau = calibrate_tau(p, 4.0);
        CpgParams q = p;
        q.tau = tau / 2.0;
        const double f_half = measure_cpg(q).frequency;
        CHECK(f_half / 4.0 > 1.8);
        CHECK(f_half / 4.0 < 2.2);
    }
    SUBCASE("band endpoints 1 Hz and 11 Hz are both solvable") {
        for (double target : {1.0, 11.0}) {
            const double tau = calibrate_tau(p, target);
            CpgParams q = p;
            q.tau = tau;
            CHECK(std::abs(measure_cpg(q).frequency - target) / target < 5e-3);
        }
    }
    SUBCASE("unreachable target reports the achievable band") {
        CHECK_THROWS_AS(calibrate_tau(p, 1e4), UnreachableFrequency);
        try {
            calibrate_tau(p, 1e4);
        } catch (const UnreachableFrequency& e) {
            CHECK(e.band_lo > 0.0);
            CHECK(e.band_hi < 1e4);
        }
    }
}

TEST_CASE("signal_metrics on constructed signals") {
    SUBCASE("pure 5 Hz sinusoid") {
        const double rate = 1000.0;
        SignalTrace tr;
        tr.sample_rate = rate;
        std::vector<double> y;
        for (int k = 0; k < 4000; ++k)
            y.push_back(std::sin(2.0 * std::numbers::pi * 5.0 * k / rate));
        tr.outputs.push_back(y);
        const SignalMetrics m = signal_metrics(tr);
        CHECK(std::abs(m.frequency - 5.0) < 0.01);
        CHECK(std::abs(m.intensities[0] - 1.0) < 0.01);
    }
    SUBCASE("delayed copy has phase -2 pi f dt") {
        const double rate = 1000.0, f = 3.0, delay = 0.04;
        SignalTrace tr;
        tr.sample_rate = rate;
        std::vector<double> a, b;
        for (int k = 0; k < 5000; ++k) {
            const double t = k / rate;
            a.push_back(std::sin(2.0 * std::numbers::pi * f * t));
            b.push_back(std::sin(2.0 * std::numbers::pi * f * (t - delay)));
        }
        tr.outputs = {a, b};
        const SignalMetrics m = signal_metrics(tr);
        const double expect = wrap_angle(-2.0 * std::numbers::pi * f * delay);
        CHECK(std::abs(wrap_angle(m.phases[0] - expect)) < 0.01);
    }
    SUBCASE("aperiodic input is rejected") {
        SignalTrace tr;
        tr.sample_rate = 100.0;
        tr.outputs.push_back(std::vector<double>(1000, 0.25));  // constant
        CHECK_THROWS_AS(signal_metrics(tr), AperiodicSignal);
    }
}

TEST_CASE("preconditions are enforced") {
    CpgParams p = CpgParams::defaults(2);
    CpgState s = CpgState::zero(2);
    CHECK_THROWS_AS(cpg_step(s, p, p.tau, 0), DataError);  // dt > tau/10
    CHECK_THROWS_AS(cpg_step(s, p, -1.0, 0), DataError);
    CpgParams bad = p;
    bad.beta[0] = -1.0;
    CHECK_THROWS_AS(cpg_step(s, bad, p.tau / 20.0, 0), DataError);
    CpgState nan_state = s;
    nan_state.u[0] = std::nan("");
    CHECK_THROWS_AS(cpg_run(p, 1.0, p.tau / 20.0, nan_state), DataError);
}

}  // TEST_SUITE
