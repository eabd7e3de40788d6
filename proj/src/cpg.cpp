#include "microswim/cpg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "microswim/errors.hpp"

namespace microswim {

CpgParams CpgParams::defaults(std::size_t n_modules) {
    CpgParams p;
    p.n = n_modules;
    p.tau = 0.05;
    p.beta.assign(n_modules, 2.5);
    p.stimulus.assign(n_modules, 1.0);
    p.alpha = 2.5;
    p.omega = 1.0;
    return p;
}

void CpgParams::validate() const {
    if (n < 1) throw DataError("CpgParams: n must be >= 1");
    if (!(tau > 0.0)) throw DataError("CpgParams: tau must be > 0");
    if (beta.size() != n || stimulus.size() != n)
        throw DataError("CpgParams: beta and stimulus must have length n");
    for (std::size_t i = 0; i < n; ++i) {
        if (beta[i] < 0.0) throw DataError("CpgParams: beta[" + std::to_string(i) + "] < 0");
        if (stimulus[i] < 0.0)
            throw DataError("CpgParams: stimulus[" + std::to_string(i) + "] < 0");
    }
}

CpgState CpgState::zero(std::size_t n_modules) {
    CpgState s;
    s.u.assign(2 * n_modules, 0.0);
    s.v.assign(2 * n_modules, 0.0);
    return s;
}

bool CpgState::finite() const {
    for (double x : u)
        if (!std::isfinite(x)) return false;
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

namespace detail {

void cpg_derivative(std::span<const double> u, std::span<const double> v,
                    const CpgParams& params, std::span<double> du, std::span<double> dv) {
    const double inv_tau = 1.0 / params.tau;
    for (std::size_t i = 0; i < params.n; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            const std::size_t idx = 2 * i + j;
            const double y_rival = std::max(0.0, u[2 * i + (1 - j)]);
            const double y_prev = i > 0 ? std::max(0.0, u[2 * (i - 1) + j]) : 0.0;
            du[idx] = (-u[idx] + params.stimulus[i] - params.beta[i] * v[idx] -
                       params.alpha * y_rival + params.omega * y_prev) *
                      inv_tau;
            dv[idx] = (-v[idx] + std::max(0.0, u[idx])) * inv_tau;
        }
    }
}

}  // namespace detail

namespace {

struct Rk4Scratch {
    std::vector<double> ku[4], kv[4], ut, vt;
    void resize(std::size_t m) {
        for (auto& k : ku) k.resize(m);
        for (auto& k : kv) k.resize(m);
        ut.resize(m);
        vt.resize(m);
    }
};

void rk4_step(CpgState& s, const CpgParams& p, double dt, Rk4Scratch& w) {
    const std::size_t m = s.u.size();
    detail::cpg_derivative(s.u, s.v, p, w.ku[0], w.kv[0]);
    for (std::size_t k = 0; k < m; ++k) {
        w.ut[k] = s.u[k] + 0.5 * dt * w.ku[0][k];
        w.vt[k] = s.v[k] + 0.5 * dt * w.kv[0][k];
    }
    detail::cpg_derivative(w.ut, w.vt, p, w.ku[1], w.kv[1]);
    for (std::size_t k = 0; k < m; ++k) {
        w.ut[k] = s.u[k] + 0.5 * dt * w.ku[1][k];
        w.vt[k] = s.v[k] + 0.5 * dt * w.kv[1][k];
    }
    detail::cpg_derivative(w.ut, w.vt, p, w.ku[2], w.kv[2]);
    for (std::size_t k = 0; k < m; ++k) {
        w.ut[k] = s.u[k] + dt * w.ku[2][k];
        w.vt[k] = s.v[k] + dt * w.kv[2][k];
    }
    detail::cpg_derivative(w.ut, w.vt, p, w.ku[3], w.kv[3]);
    const double h6 = dt / 6.0;
    for (std::size_t k = 0; k < m; ++k) {
        s.u[k] += h6 * (w.ku[0][k] + 2.0 * w.ku[1][k] + 2.0 * w.ku[2][k] + w.ku[3][k]);
        s.v[k] += h6 * (w.kv[0][k] + 2.0 * w.kv[1][k] + 2.0 * w.kv[2][k] + w.kv[3][k]);
    }
}

bool all_zero(const CpgState& s) {
    for (double x : s.u)
        if (x != 0.0) return false;
    for (double x : s.v)
        if (x != 0.0) return false;
    return true;
}

}  // namespace

CpgState cpg_step(const CpgState& state, const CpgParams& params, double dt, long step_index) {
    params.validate();
    if (!(dt > 0.0)) throw DataError("cpg_step: dt must be > 0");
    if (dt > params.tau / 10.0 + 1e-15)
        throw DataError("cpg_step: dt exceeds tau/10 stability guard");
    if (state.u.size() != 2 * params.n || state.v.size() != 2 * params.n)
        throw DataError("cpg_step: state size does not match params.n");

    CpgState next = state;
    Rk4Scratch scratch;
    scratch.resize(state.u.size());
    rk4_step(next, params, dt, scratch);
    if (!next.finite())
        throw IntegrationDivergence("cpg_step: non-finite state", step_index);
    return next;
}

CpgIntegrator::CpgIntegrator(CpgParams params, CpgState initial)
    : params_(std::move(params)), state_(std::move(initial)) {
    params_.validate();
    if (state_.u.size() != 2 * params_.n || state_.v.size() != 2 * params_.n)
        throw DataError("CpgIntegrator: state size does not match params.n");
    scratch_.assign(10 * state_.u.size(), 0.0);
}

void CpgIntegrator::advance(double dt, int substeps) {
    const std::size_t m = state_.u.size();
    const double h = dt / substeps;
    if (!(h > 0.0) || h > params_.tau / 10.0 + 1e-15)
        throw DataError("CpgIntegrator: substep exceeds tau/10 stability guard");
    // lanes: 4x ku, 4x kv, ut, vt
    std::span<double> ku[4], kv[4];
    for (int i = 0; i < 4; ++i) {
        ku[i] = {scratch_.data() + i * m, m};
        kv[i] = {scratch_.data() + (4 + i) * m, m};
    }
    std::span<double> ut{scratch_.data() + 8 * m, m};
    std::span<double> vt{scratch_.data() + 9 * m, m};

    for (int s = 0; s < substeps; ++s) {
        detail::cpg_derivative(state_.u, state_.v, params_, ku[0], kv[0]);
        for (std::size_t k = 0; k < m; ++k) {
            ut[k] = state_.u[k] + 0.5 * h * ku[0][k];
            vt[k] = state_.v[k] + 0.5 * h * kv[0][k];
        }
        detail::cpg_derivative(ut, vt, params_, ku[1], kv[1]);
        for (std::size_t k = 0; k < m; ++k) {
            ut[k] = state_.u[k] + 0.5 * h * ku[1][k];
            vt[k] = state_.v[k] + 0.5 * h * kv[1][k];
        }
        detail::cpg_derivative(ut, vt, params_, ku[2], kv[2]);
        for (std::size_t k = 0; k < m; ++k) {
            ut[k] = state_.u[k] + h * ku[2][k];
            vt[k] = state_.v[k] + h * kv[2][k];
        }
        detail::cpg_derivative(ut, vt, params_, ku[3], kv[3]);
        const double h6 = h / 6.0;
        for (std::size_t k = 0; k < m; ++k) {
            state_.u[k] += h6 * (ku[0][k] + 2.0 * ku[1][k] + 2.0 * ku[2][k] + ku[3][k]);
            state_.v[k] += h6 * (kv[0][k] + 2.0 * kv[1][k] + 2.0 * kv[2][k] + kv[3][k]);
        }
        ++steps_;
    }
    if (!state_.finite()) throw IntegrationDivergence("CpgIntegrator: non-finite state", steps_);
}

SignalTrace cpg_run(const CpgParams& params, double duration, double dt,
                    const CpgState& initial, double sample_rate) {
    params.validate();
    if (!(duration > 0.0)) throw DataError("cpg_run: duration must be > 0");
    if (!(dt > 0.0) || dt > params.tau / 10.0 + 1e-15)
        throw DataError("cpg_run: dt must satisfy 0 < dt <= tau/10");
    if (!initial.finite()) throw DataError("cpg_run: non-finite initial state");

    CpgState s = initial;
    if (s.u.size() != 2 * params.n || s.v.size() != 2 * params.n)
        throw DataError("cpg_run: initial state size does not match params.n");
    // leave the unstable symmetric equilibrium; with zero stimulus the origin
    // is the true (stable) solution and stays untouched
    double e_max = 0.0;
    for (double e : params.stimulus) e_max = std::max(e_max, e);
    if (all_zero(s) && e_max > 0.0) s.u_at(0, 0) += 1e-6;

    const long steps = static_cast<long>(std::llround(duration / dt));
    long stride = 1;
    if (sample_rate > 0.0) stride = std::max<long>(1, static_cast<long>(std::llround(1.0 / (sample_rate * dt))));

    SignalTrace trace;
    trace.sample_rate = 1.0 / (dt * static_cast<double>(stride));
    trace.outputs.assign(params.n, {});
    const std::size_t reserve = static_cast<std::size_t>(steps / stride + 2);
    for (auto& ch : trace.outputs) ch.reserve(reserve);

    Rk4Scratch scratch;
    scratch.resize(s.u.size());
    for (std::size_t i = 0; i < params.n; ++i)
        trace.outputs[i].push_back(cpg_output(s.u_at(i, 0), s.u_at(i, 1)));
    for (long step = 1; step <= steps; ++step) {
        rk4_step(s, params, dt, scratch);
        if (!s.finite()) throw IntegrationDivergence("cpg_run: non-finite state", step);
        if (step % stride == 0)
            for (std::size_t i = 0; i < params.n; ++i)
                trace.outputs[i].push_back(cpg_output(s.u_at(i, 0), s.u_at(i, 1)));
    }
    return trace;
}

SignalMetrics signal_metrics(const SignalTrace& trace) {
    if (trace.outputs.empty()) throw DataError("signal_metrics: empty trace");
    if (!(trace.sample_rate > 0.0)) throw DataError("signal_metrics: sample_rate must be > 0");

    const auto& ref = trace.outputs.back();
    const double f = dominant_frequency(ref, trace.sample_rate);
    const double cycles = f * static_cast<double>(ref.size()) / trace.sample_rate;
    if (cycles < 4.0)
        throw AperiodicSignal("signal_metrics: trace covers fewer than ~5 cycles");

    SignalMetrics m;
    m.frequency = f;
    std::vector<double> phase_abs(trace.outputs.size());
    for (std::size_t i = 0; i < trace.outputs.size(); ++i) {
        const SpectralLine line = fundamental_component(trace.outputs[i], trace.sample_rate, f);
        m.intensities.push_back(line.amplitude);
        phase_abs[i] = line.phase;
    }
    for (std::size_t i = 0; i + 1 < phase_abs.size(); ++i)
        m.phases.push_back(wrap_angle(phase_abs[i + 1] - phase_abs[i]));
    return m;
}

SignalMetrics measure_cpg(const CpgParams& params, double dt) {
    params.validate();
    if (dt <= 0.0) dt = params.tau / 50.0;

    // Pilot run to estimate the rhythm, then a run long enough to drop the
    // transient (max of 2 s and 10 periods) and keep >= 8 cycles.
    const double pilot_T = std::max(2.0, 60.0 * params.tau);
    SignalTrace pilot = cpg_run(params, pilot_T, dt, CpgState::zero(params.n));
    const auto& ref = pilot.outputs.back();
    const std::size_t half = ref.size() / 2;
    std::vector<double> tail(ref.begin() + static_cast<long>(half), ref.end());
    const double f_est = dominant_frequency(tail, pilot.sample_rate);

    const double transient = std::max(2.0, 10.0 / f_est);
    const double duration = transient + 10.0 / f_est;
    SignalTrace full = cpg_run(params, duration, dt, CpgState::zero(params.n));
    const std::size_t skip =
        static_cast<std::size_t>(transient * full.sample_rate);
    SignalTrace steady;
    steady.sample_rate = full.sample_rate;
    for (auto& ch : full.outputs) {
        if (skip >= ch.size()) throw AperiodicSignal("measure_cpg: trace shorter than transient");
        steady.outputs.emplace_back(ch.begin() + static_cast<long>(skip), ch.end());
    }
    return signal_metrics(steady);
}

double calibrate_tau(const CpgParams& params, double target_frequency,
                     const CalibrationOptions& options) {
    params.validate();
    if (!(target_frequency > 0.0)) throw DataError("calibrate_tau: target must be > 0 Hz");

    auto freq_at = [&](double tau) {
        CpgParams p = params;
        p.tau = tau;
        return measure_cpg(p).frequency;
    };

    // Frequency decreases monotonically in tau, so probe the bracket ends.
    const double f_hi = freq_at(options.tau_lo);
    const double f_lo = freq_at(options.tau_hi);
    if (target_frequency > f_hi || target_frequency < f_lo)
        throw UnreachableFrequency(target_frequency, f_lo, f_hi);

    double lo = options.tau_lo, hi = options.tau_hi;
    double f_at_lo = f_hi;
    if (std::abs(f_at_lo - target_frequency) <= options.tolerance * target_frequency) return lo;
    if (std::abs(f_lo - target_frequency) <= options.tolerance * target_frequency) return hi;

    double mid = std::sqrt(lo * hi);
    for (int it = 0; it < options.max_iterations; ++it) {
        mid = std::sqrt(lo * hi);  // bisect in log(tau)
        const double f_mid = freq_at(mid);
        if (std::abs(f_mid - target_frequency) <= options.tolerance * target_frequency) return mid;
        if (f_mid > target_frequency)
            lo = mid;  // too fast -> raise tau
        else
            hi = mid;
        if (hi / lo < 1.0 + 1e-12) break;
    }
    const double f_final = freq_at(mid);
    if (std::abs(f_final - target_frequency) <= 5e-3 * target_frequency) return mid;
    throw NumericalError("calibrate_tau: bisection failed to converge to " +
                         std::to_string(target_frequency) + " Hz");
}

}  // namespace microswim
