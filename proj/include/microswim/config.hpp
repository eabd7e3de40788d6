#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "microswim/cpg.hpp"
#include "microswim/ephe.hpp"
#include "microswim/robot.hpp"
#include "microswim/sensitivity.hpp"
#include "microswim/sim.hpp"

namespace microswim {

struct SweepSection {
    std::vector<double> frequencies;   ///< Hz; empty = CLI must supply
    double duration = 14.0;            ///< s per simulated point
    double dt = 5e-4;
    double metrics_window = 2.0;       ///< s
};

struct LearnSection {
    LearnConfig core;
    std::size_t repeat = 1;            ///< independent learning runs
    double initial_frequency = 4.0;    ///< Hz target for the initial tau
    double sigma_scale = 0.3;
    double initial_jitter = 0.1;       ///< relative mu jitter between repeats
};

struct DisruptSection {
    GaitRegime regime = GaitRegime::StandingWave;
    std::size_t repeats = 3;
    double sw_frequency = 6.0;   ///< Hz, nominal tau target for the SW regime
    double tw_frequency = 2.0;   ///< Hz, for the TW regime
    std::optional<std::string> policy_file;  ///< best_policy.json from a learn run
    SensitivityConfig core;
};

struct AnalyzeSection {
    std::string mode = "st";     ///< "st" | "cluster"
    std::size_t k = 2;
    std::size_t restarts = 20;
};

/// Full resolved experiment configuration. Every supplementary-gap default
/// is visible here and in the `--explain-config` dump.
struct ExperimentConfig {
    std::string design_name = "ubot4";
    RobotDesign design;          ///< resolved from design_name or inline object
    std::uint64_t seed = 1;
    int jobs = 1;
    bool plots = false;
    SimConfig sim;
    CpgParams cpg;               ///< base parameters, sized to design.dof
    LearnSection learn;
    SweepSection sweep;
    DisruptSection disrupt;
    AnalyzeSection analyze;
};

/// Parses a JSON config file; unknown keys are an error (typo guard).
/// Parse failures name the file and line.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Defaults resolved for a design name, no file needed.
ExperimentConfig default_config(const std::string& design_name);

/// Full resolved-config echo (round-trips through load).
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Human-oriented dump: resolved values plus per-key documentation.
std::string explain_config(const ExperimentConfig& cfg);

}  // namespace microswim
