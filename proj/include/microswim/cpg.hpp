#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "microswim/fourier.hpp"

namespace microswim {

/// Parameters of the chained dual-neuron oscillator network.
///
/// Module i holds two mutually inhibiting neurons with adaptation; modules
/// are coupled head-to-tail by an excitatory feedforward weight, the first
/// module receiving no inter-module input. tau sets the rhythm time scale
/// (both neuron and adaptation states share it), beta the per-module
/// adaptation strength, stimulus the per-module drive.
struct CpgParams {
    std::size_t n = 4;                 ///< module count (one module per actuated joint)
    double tau = 0.05;                 ///< time constant, seconds (> 0)
    std::vector<double> beta;          ///< adaptation coefficient per module (>= 0)
    std::vector<double> stimulus;      ///< external drive per module (>= 0)
    double alpha = 2.5;                ///< mutual inhibition weight
    double omega = 1.0;                ///< inter-module connection weight

    /// Fixed-parameter defaults; beta = 2.5 and stimulus = 1.0 per module.
    static CpgParams defaults(std::size_t n_modules);

    /// Throws DataError when sizes or signs violate the invariants.
    void validate() const;
};

/// Neuron membrane and adaptation states, flattened as state(i, j) with
/// module index i in [0, n) and neuron index j in {0, 1}.
struct CpgState {
    std::vector<double> u;  ///< membrane states, size 2n
    std::vector<double> v;  ///< adaptation states, size 2n

    static CpgState zero(std::size_t n_modules);
    bool finite() const;

    double& u_at(std::size_t i, std::size_t j) { return u[2 * i + j]; }
    double& v_at(std::size_t i, std::size_t j) { return v[2 * i + j]; }
    double u_at(std::size_t i, std::size_t j) const { return u[2 * i + j]; }
    double v_at(std::size_t i, std::size_t j) const { return v[2 * i + j]; }
};

/// Per-module output time series y_out = max(0,u1) - max(0,u2), sampled at
/// a uniform rate.
struct SignalTrace {
    double sample_rate = 0.0;                   ///< Hz
    std::vector<std::vector<double>> outputs;   ///< [module][sample]
};

/// Rhythm characterization extracted from a trace.
struct SignalMetrics {
    double frequency = 0.0;            ///< Hz, dominant peak of the last module
    std::vector<double> intensities;   ///< fundamental amplitude per module
    std::vector<double> phases;        ///< phase(module i+1) - phase(module i), wrapped
};

/// Module output for a membrane state pair.
inline double cpg_output(double u1, double u2) {
    const double y1 = u1 > 0.0 ? u1 : 0.0;
    const double y2 = u2 > 0.0 ? u2 : 0.0;
    return y1 - y2;
}

namespace detail {
/// Raw derivative of the network ODE; spans sized 2n.
void cpg_derivative(std::span<const double> u, std::span<const double> v,
                    const CpgParams& params, std::span<double> du, std::span<double> dv);
}  // namespace detail

/// Advances the network one step with the classic 4-stage 4th-order scheme.
/// Requires 0 < dt <= tau/10. step_index only labels a divergence error.
CpgState cpg_step(const CpgState& state, const CpgParams& params, double dt,
                  long step_index = 0);

/// Allocation-free stepper for hot loops: validates once at construction,
/// then advances the held state in place.
class CpgIntegrator {
public:
    CpgIntegrator(CpgParams params, CpgState initial);

    /// Advances by dt (split into `substeps` equal substeps); throws
    /// IntegrationDivergence with a running step index on blowup.
    void advance(double dt, int substeps = 1);

    const CpgState& state() const { return state_; }
    double output(std::size_t module) const {
        return cpg_output(state_.u_at(module, 0), state_.u_at(module, 1));
    }

private:
    CpgParams params_;
    CpgState state_;
    std::vector<double> scratch_;  // 10 lanes of 2n
    long steps_ = 0;
};

/// Integrates for `duration` seconds and returns per-module outputs sampled
/// at `sample_rate` (0 = every integration step). An exactly-zero initial
/// state gets a 1e-6 nudge on u(0,0) to leave the symmetric equilibrium.
SignalTrace cpg_run(const CpgParams& params, double duration, double dt,
                    const CpgState& initial, double sample_rate = 0.0);

/// Frequency, per-module fundamental intensities and adjacent-module phase
/// lags of a trace. The trace must cover at least ~5 cycles post transient.
SignalMetrics signal_metrics(const SignalTrace& trace);

/// Runs the network with the module's transient-removal rule
/// (drop max(2 s, 10 periods)) and measures the steady rhythm.
SignalMetrics measure_cpg(const CpgParams& params, double dt = 0.0);

struct CalibrationOptions {
    double tau_lo = 2e-3;        ///< search bracket, seconds
    double tau_hi = 2.0;
    double tolerance = 1e-3;     ///< relative frequency tolerance (< the 0.5% contract)
    int max_iterations = 80;
};

/// Bisection on tau so the measured output frequency matches the target.
/// Probes the bracket endpoints first and throws UnreachableFrequency with
/// the achievable band when the target lies outside it.
double calibrate_tau(const CpgParams& params, double target_frequency,
                     const CalibrationOptions& options = {});

}  // namespace microswim
