#include "microswim/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "microswim/csv.hpp"
#include "microswim/errors.hpp"
#include "microswim/fourier.hpp"
#include "microswim/gait.hpp"
#include "microswim/parallel.hpp"
#include "microswim/rng.hpp"

namespace microswim {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::string DisruptionSpec::label() const {
    switch (kind) {
        case DisruptionKind::Intensity: return "in" + std::to_string(target + 1);
        case DisruptionKind::IntersegmentalPhase: return "p" + std::to_string(target + 1);
        case DisruptionKind::FrequencyUp: return "f+";
        case DisruptionKind::FrequencyDown: return "f-";
    }
    return "?";
}

void DisruptionSpec::validate(std::size_t dof) const {
    if (magnitude == 0.0) throw DataError("DisruptionSpec: magnitude must be nonzero");
    switch (kind) {
        case DisruptionKind::Intensity:
            if (target >= dof)
                throw DataError("DisruptionSpec: intensity target " + std::to_string(target + 1) +
                                " exceeds dof " + std::to_string(dof));
            break;
        case DisruptionKind::IntersegmentalPhase:
            if (target + 1 >= dof)
                throw DataError("DisruptionSpec: phase target " + std::to_string(target + 1) +
                                " exceeds dof-1 pairs");
            break;
        default:
            break;
    }
}

std::vector<DisruptionSpec> disruption_set(std::size_t dof, double intensity_magnitude,
                                           double phase_magnitude, double frequency_magnitude) {
    std::vector<DisruptionSpec> set;
    for (std::size_t i = 0; i < dof; ++i)
        set.push_back({DisruptionKind::Intensity, i, intensity_magnitude});
    for (std::size_t i = 0; i + 1 < dof; ++i)
        set.push_back({DisruptionKind::IntersegmentalPhase, i, phase_magnitude});
    set.push_back({DisruptionKind::FrequencyUp, 0, frequency_magnitude});
    set.push_back({DisruptionKind::FrequencyDown, 0, frequency_magnitude});
    return set;
}

VoltageSignal apply_disruption(const VoltageSignal& nominal, const DisruptionSpec& spec,
                               double nominal_frequency) {
    spec.validate(nominal.channel_count());
    VoltageSignal out = nominal;
    switch (spec.kind) {
        case DisruptionKind::Intensity:
            out.scale_channel(spec.target, 1.0 + spec.magnitude);
            break;
        case DisruptionKind::IntersegmentalPhase: {
            if (!(nominal_frequency > 0.0))
                throw DataError("apply_disruption: phase shift needs the nominal frequency");
            const double delay = spec.magnitude / (kTwoPi * nominal_frequency);
            out.delay_channels_from(spec.target + 1, delay);
            break;
        }
        case DisruptionKind::FrequencyUp:
            out.rescale_time(1.0 + spec.magnitude);
            break;
        case DisruptionKind::FrequencyDown:
            out.rescale_time(1.0 - spec.magnitude);
            break;
    }
    return out;
}

SensitivityValue sensitivity_index(double nominal_output, double disrupted_output,
                                   double input_relative_change, bool output_is_phase) {
    if (input_relative_change == 0.0)
        throw DataError("sensitivity_index: input change must be nonzero");
    SensitivityValue s;
    if (output_is_phase) {
        s.value = std::abs(wrap_angle(disrupted_output - nominal_output)) / kTwoPi /
                  std::abs(input_relative_change);
        return s;
    }
    if (nominal_output == 0.0) {
        s.absolute_variant = true;
        s.value = std::abs(disrupted_output) / std::abs(input_relative_change);
        return s;
    }
    s.value = std::abs((disrupted_output - nominal_output) / nominal_output) /
              std::abs(input_relative_change);
    return s;
}

namespace {

struct Outputs {
    std::vector<double> values;  // spd, cv, m_1..m_n, ip_1..ip_{n-1}
    bool ok = false;
};

Outputs run_and_measure(const RobotDesign& design, const VoltageSignal& signal, double duration,
                        double dt, double window, const SimConfig& sim_config) {
    Outputs out;
    try {
        const Trajectory traj = simulate_signal(design, signal, duration, dt, sim_config);
        const GaitSummary s = compute_gait_metrics(traj, design, window);
        out.values.push_back(s.metrics.speed);
        out.values.push_back(s.metrics.caudal_tip_velocity);
        for (double m : s.metrics.joint_amplitudes) out.values.push_back(m);
        for (double p : s.metrics.intersegmental_phases) out.values.push_back(p);
        out.ok = true;
    } catch (const NumericalError&) {
        out.ok = false;
    }
    return out;
}

double relative_input_change(const DisruptionSpec& spec) {
    if (spec.kind == DisruptionKind::IntersegmentalPhase)
        return spec.magnitude / kTwoPi;  // phase-type inputs normalize by a full turn
    return spec.magnitude;
}

}  // namespace

SensitivityReport sensitivity_matrix(const RobotDesign& design, const CpgParams& nominal,
                                     GaitRegime regime, std::size_t repeats, std::uint64_t seed,
                                     const SensitivityConfig& config,
                                     const SimConfig& sim_config) {
    nominal.validate();
    if (nominal.n != design.dof)
        throw DataError("sensitivity_matrix: nominal cpg modules must equal design.dof");
    if (repeats < 1) throw DataError("sensitivity_matrix: repeats must be >= 1");

    const std::size_t n = design.dof;
    const auto disruptions = disruption_set(n, config.intensity_magnitude,
                                            config.phase_magnitude, config.frequency_magnitude);
    const std::size_t n_rows = 2 + n + (n - 1);
    const std::size_t n_cols = disruptions.size();  // n + (n-1) + 2

    SensitivityReport report;
    report.regime = regime;
    report.repeats = repeats;
    report.row_labels = {"spd", "cv"};
    for (std::size_t i = 0; i < n; ++i) report.row_labels.push_back("m" + std::to_string(i + 1));
    for (std::size_t i = 0; i + 1 < n; ++i)
        report.row_labels.push_back("ip" + std::to_string(i + 1));
    for (const auto& d : disruptions) report.col_labels.push_back(d.label());

    const double f_nominal = measure_cpg(nominal).frequency;

    // margin so delayed / slowed signals never run off the table
    const double table_duration = config.sim_duration / (1.0 - config.frequency_magnitude) +
                                  1.0 / f_nominal + 1.0;
    const double cpg_dt = nominal.tau / 20.0;

    // per-repeat nominal signal tables (seed varies the initial network state)
    std::vector<VoltageSignal> signals;
    std::vector<Outputs> nominal_out(repeats);
    double e_max = 0.0;
    for (double e : nominal.stimulus) e_max = std::max(e_max, e);
    for (std::size_t r = 0; r < repeats; ++r) {
        CpgState init = CpgState::zero(n);
        init.u_at(0, 0) += 1e-6;
        if (sim_config.cpg_init_noise > 0.0 && e_max > 0.0) {
            Rng rng = Rng::substream(seed, "repeat", r);
            for (auto& u : init.u) u += rng.normal(0.0, sim_config.cpg_init_noise * e_max);
        }
        signals.push_back(VoltageSignal::from_cpg(nominal, table_duration, cpg_dt, init,
                                                  sim_config.voltage_scale));
    }

    parallel_for(repeats, config.jobs, [&](std::size_t r) {
        nominal_out[r] = run_and_measure(design, signals[r], config.sim_duration, config.sim_dt,
                                         config.metrics_window, sim_config);
    });

    // all disrupted cells, indexed by (repeat, disruption)
    std::vector<Outputs> cell(repeats * n_cols);
    parallel_for(repeats * n_cols, config.jobs, [&](std::size_t idx) {
        const std::size_t r = idx / n_cols;
        const std::size_t d = idx % n_cols;
        if (!nominal_out[r].ok) return;
        const VoltageSignal disrupted = apply_disruption(signals[r], disruptions[d], f_nominal);
        cell[idx] = run_and_measure(design, disrupted, config.sim_duration, config.sim_dt,
                                    config.metrics_window, sim_config);
    });

    report.mean.assign(n_rows, std::vector<double>(n_cols, 0.0));
    report.stddev.assign(n_rows, std::vector<double>(n_cols, 0.0));
    report.valid.assign(n_rows, std::vector<bool>(n_cols, true));

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t d = 0; d < n_cols; ++d) {
        const double in_rel = relative_input_change(disruptions[d]);
        for (std::size_t row = 0; row < n_rows; ++row) {
            const bool is_phase_row = row >= 2 + n;
            std::vector<double> vals;
            bool ok = true;
            for (std::size_t r = 0; r < repeats; ++r) {
                const Outputs& dis = cell[r * n_cols + d];
                if (!nominal_out[r].ok || !dis.ok) {
                    ok = false;
                    break;
                }
                vals.push_back(sensitivity_index(nominal_out[r].values[row], dis.values[row],
                                                 in_rel, is_phase_row)
                                   .value);
            }
            if (!ok) {
                report.mean[row][d] = nan;
                report.stddev[row][d] = nan;
                report.valid[row][d] = false;
                continue;
            }
            double mean = 0.0;
            for (double v : vals) mean += v;
            mean /= static_cast<double>(vals.size());
            double var = 0.0;
            for (double v : vals) var += (v - mean) * (v - mean);
            var /= static_cast<double>(vals.size());
            report.mean[row][d] = mean;
            report.stddev[row][d] = std::sqrt(var);
        }
    }
    return report;
}

void write_sensitivity_csv(const SensitivityReport& report, const std::filesystem::path& path) {
    std::vector<std::string> cols{"output"};
    for (const auto& c : report.col_labels) cols.push_back(c);
    for (const auto& c : report.col_labels) cols.push_back(c + "_std");

    CsvWriter w(path, "microswim.sensitivity.v1", cols);
    for (std::size_t row = 0; row < report.row_labels.size(); ++row) {
        std::vector<std::string> cells{report.row_labels[row]};
        for (std::size_t c = 0; c < report.col_labels.size(); ++c)
            cells.push_back(format_double(report.mean[row][c]));
        for (std::size_t c = 0; c < report.col_labels.size(); ++c)
            cells.push_back(format_double(report.stddev[row][c]));
        w.row_raw(cells);
    }
}

}  // namespace microswim
