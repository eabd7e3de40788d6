#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "microswim/config.hpp"

namespace microswim {

/// Creates (or reuses, with `overwrite`) the run directory. Refuses a
/// nonempty directory otherwise.
void prepare_run_dir(const std::filesystem::path& dir, bool overwrite);

/// Learning pipeline: per repeat, a learning run with seed-varied initial
/// distribution; writes learning_trace[_r].csv, best_policy.json, the best
/// policy's trajectory.csv + metrics.csv, then manifest.json.
void cmd_learn(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
               bool overwrite = false);

/// Frequency response: calibrates tau per target, simulates, and emits
/// sweep.csv (one row per frequency; uncalibratable rows marked skipped)
/// plus workloops.csv.
void cmd_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
               bool overwrite = false);

/// Disruption study around the configured nominal policy; writes
/// sensitivity.csv (and heatmap.svg with plots enabled).
void cmd_disrupt(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                 bool overwrite = false);

/// Dataset analysis (mode st or cluster) of a swimmers CSV; writes fit/
/// cluster CSVs and summary.txt.
void cmd_analyze(const ExperimentConfig& cfg, const std::filesystem::path& input_csv,
                 const std::filesystem::path& out_dir, bool overwrite = false);

/// Tau calibration table for the configured sweep frequencies.
void cmd_calibrate(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                   bool overwrite = false);

/// Resolves the output directory against MICROSWIM_OUTPUT_ROOT when the
/// given path is relative and the variable is set.
std::filesystem::path resolve_output_dir(const std::string& requested);

}  // namespace microswim
