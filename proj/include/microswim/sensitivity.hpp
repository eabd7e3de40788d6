#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "microswim/cpg.hpp"
#include "microswim/robot.hpp"
#include "microswim/signal.hpp"
#include "microswim/sim.hpp"

namespace microswim {

enum class DisruptionKind { Intensity, IntersegmentalPhase, FrequencyUp, FrequencyDown };

/// One motor-signal disruption. `target` is 0-based: a joint for Intensity,
/// a phase-pair index for IntersegmentalPhase (pair i sits between joints
/// i+1 and i+2 in 1-based labels), ignored for the frequency kinds.
/// `magnitude` is a relative fraction for intensity/frequency and radians
/// for phase; it must be nonzero.
struct DisruptionSpec {
    DisruptionKind kind = DisruptionKind::Intensity;
    std::size_t target = 0;
    double magnitude = 0.2;

    std::string label() const;
    void validate(std::size_t dof) const;
};

/// The design's full disruption set: in_1..in_n, p_1..p_{n-1}, f+, f-.
std::vector<DisruptionSpec> disruption_set(std::size_t dof, double intensity_magnitude,
                                           double phase_magnitude, double frequency_magnitude);

/// Applies one disruption to a voltage signal. Phase disruptions delay every
/// channel behind the pair by magnitude/(2 pi f) seconds; frequency
/// disruptions rescale time by (1 +- magnitude).
VoltageSignal apply_disruption(const VoltageSignal& nominal, const DisruptionSpec& spec,
                               double nominal_frequency);

/// S = |relative output change| / |relative input change|. Phase-type
/// quantities use |wrapped difference|/(2 pi) as their relative change.
/// A zero nominal output switches to the absolute-change variant (flagged).
struct SensitivityValue {
    double value = 0.0;
    bool absolute_variant = false;
};
SensitivityValue sensitivity_index(double nominal_output, double disrupted_output,
                                   double input_relative_change, bool output_is_phase = false);

enum class GaitRegime { StandingWave, TravelingWave };

struct SensitivityConfig {
    double intensity_magnitude = 0.2;           ///< +20%
    double phase_magnitude = 0.39269908169872414;  ///< pi/8 rad
    double frequency_magnitude = 0.2;
    double sim_duration = 8.0;                  ///< s per cell rollout
    double sim_dt = 5e-4;
    double metrics_window = 2.0;                ///< s
    int jobs = 1;
};

/// Saturating presentation clamp for heatmaps: values above the clamp all
/// display as maximum sensitivity. Raw data is never modified.
inline double display_clamped(double raw, double clamp = 1.5) {
    return raw > clamp ? clamp : raw;
}

/// Row-major sensitivity matrix: rows are outputs (spd, cv, m_1.., ip_1..),
/// columns the disruption set. Raw values are retained; the 1.5 display
/// clamp applies only at presentation time.
struct SensitivityReport {
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::vector<std::vector<double>> mean;   ///< [row][col]
    std::vector<std::vector<double>> stddev;
    std::vector<std::vector<bool>> valid;    ///< false when a rollout diverged
    std::size_t repeats = 0;
    GaitRegime regime = GaitRegime::StandingWave;
    double display_clamp = 1.5;
};

/// Runs `repeats` seed-varied repetitions of the full disruption protocol
/// around the given nominal network parameters.
SensitivityReport sensitivity_matrix(const RobotDesign& design, const CpgParams& nominal,
                                     GaitRegime regime, std::size_t repeats, std::uint64_t seed,
                                     const SensitivityConfig& config = {},
                                     const SimConfig& sim_config = {});

void write_sensitivity_csv(const SensitivityReport& report, const std::filesystem::path& path);

}  // namespace microswim
