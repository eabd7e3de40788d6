// microswim command line front end
//
// subcommands: learn | sweep | disrupt | analyze | calibrate
// exit codes:  0 success, 1 usage, 2 data error, 3 numerical divergence

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "microswim/config.hpp"
#include "microswim/errors.hpp"
#include "microswim/experiments.hpp"
#include "microswim/manifest.hpp"

namespace {

using microswim::ExperimentConfig;

struct CommonArgs {
    std::string config_path;
    std::string design;
    std::string output;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 0;
    bool plots = false;
    bool overwrite = false;
    bool explain = false;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool needs_output = true) {
    cmd->add_option("-c,--config", a.config_path, "JSON config file");
    cmd->add_option("--design", a.design, "design name (ubot2|ubot4|ubot6|ubot4_nofin)");
    auto* seed = cmd->add_option("--seed", a.seed, "root seed for all substreams");
    seed->each([&a](const std::string&) { a.seed_set = true; });
    cmd->add_option("--jobs", a.jobs, "parallel rollouts/cells (default 1)");
    cmd->add_flag("--plots", a.plots, "emit SVG plots alongside CSVs");
    cmd->add_flag("--overwrite", a.overwrite, "allow writing into a nonempty directory");
    cmd->add_flag("--explain-config", a.explain, "print the resolved config and exit");
    if (needs_output)
        cmd->add_option("-o,--output", a.output, "output run directory")->required();
}

ExperimentConfig resolve(const CommonArgs& a) {
    ExperimentConfig cfg = a.config_path.empty()
                               ? microswim::default_config(a.design.empty() ? "ubot4" : a.design)
                               : microswim::load_config(a.config_path);
    if (!a.design.empty() && !a.config_path.empty()) {
        cfg.design_name = a.design;
        cfg.design = microswim::design_by_name(a.design);
        cfg.cpg = microswim::CpgParams::defaults(cfg.design.dof);
    }
    if (a.seed_set) {
        cfg.seed = a.seed;
        cfg.learn.core.seed = a.seed;
    }
    if (a.jobs > 0) {
        cfg.jobs = a.jobs;
        cfg.learn.core.jobs = a.jobs;
        cfg.disrupt.core.jobs = a.jobs;
    }
    if (a.plots) cfg.plots = true;
    return cfg;
}

/// Returns true when --explain-config consumed the invocation.
bool maybe_explain(const CommonArgs& a, const ExperimentConfig& cfg) {
    if (!a.explain) return false;
    std::cout << microswim::explain_config(cfg);
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"microswim: CPG-driven undulatory swimmer lab"};
    app.require_subcommand(1);

    CommonArgs learn_args, sweep_args, disrupt_args, analyze_args, calib_args;
    std::string task = "forward";
    std::size_t learn_repeat = 0;
    std::vector<double> frequencies;
    std::string analyze_input, analyze_mode, regime;

    auto* learn = app.add_subcommand("learn", "optimize CPG parameters for swimming speed");
    add_common(learn, learn_args);
    learn->add_option("--task", task, "forward | backward");
    learn->add_option("--repeat", learn_repeat, "independent learning runs");

    auto* sweep = app.add_subcommand("sweep", "frequency response of a fixed policy");
    add_common(sweep, sweep_args);
    sweep->add_option("--frequencies", frequencies, "target frequencies [Hz]");

    auto* disrupt = app.add_subcommand("disrupt", "motor-disruption sensitivity study");
    add_common(disrupt, disrupt_args);
    disrupt->add_option("--regime", regime, "SW | TW gait regime");

    auto* analyze = app.add_subcommand("analyze", "speed/undulation dataset analysis");
    add_common(analyze, analyze_args);
    analyze->add_option("-i,--input", analyze_input, "swimmers CSV (label,speed,undulatory_velocity[,group])")
        ->required();
    analyze->add_option("--mode", analyze_mode, "st | cluster");

    auto* calibrate = app.add_subcommand("calibrate", "tau calibration for target frequencies");
    add_common(calibrate, calib_args);
    calibrate->add_option("--frequencies", frequencies, "target frequencies [Hz]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (learn->parsed()) {
            ExperimentConfig cfg = resolve(learn_args);
            if (learn->count("--task")) {
                if (task != "forward" && task != "backward")
                    throw microswim::DataError("--task must be forward or backward");
                cfg.learn.core.task =
                    task == "forward" ? microswim::Task::Forward : microswim::Task::Backward;
            }
            if (learn_repeat > 0) cfg.learn.repeat = learn_repeat;
            if (maybe_explain(learn_args, cfg)) return 0;
            microswim::cmd_learn(cfg, microswim::resolve_output_dir(learn_args.output),
                                 learn_args.overwrite);
        } else if (sweep->parsed()) {
            ExperimentConfig cfg = resolve(sweep_args);
            if (!frequencies.empty()) cfg.sweep.frequencies = frequencies;
            if (maybe_explain(sweep_args, cfg)) return 0;
            if (cfg.sweep.frequencies.empty()) {
                std::cerr << "sweep: empty frequency list\n";
                return 1;
            }
            microswim::cmd_sweep(cfg, microswim::resolve_output_dir(sweep_args.output),
                                 sweep_args.overwrite);
        } else if (disrupt->parsed()) {
            ExperimentConfig cfg = resolve(disrupt_args);
            if (disrupt->count("--regime")) {
                if (regime == "SW")
                    cfg.disrupt.regime = microswim::GaitRegime::StandingWave;
                else if (regime == "TW")
                    cfg.disrupt.regime = microswim::GaitRegime::TravelingWave;
                else
                    throw microswim::DataError("--regime must be SW or TW");
            }
            if (maybe_explain(disrupt_args, cfg)) return 0;
            microswim::cmd_disrupt(cfg, microswim::resolve_output_dir(disrupt_args.output),
                                   disrupt_args.overwrite);
        } else if (analyze->parsed()) {
            ExperimentConfig cfg = resolve(analyze_args);
            if (analyze->count("--mode")) {
                if (analyze_mode != "st" && analyze_mode != "cluster")
                    throw microswim::DataError("--mode must be st or cluster");
                cfg.analyze.mode = analyze_mode;
            }
            if (maybe_explain(analyze_args, cfg)) return 0;
            microswim::cmd_analyze(cfg, analyze_input,
                                   microswim::resolve_output_dir(analyze_args.output),
                                   analyze_args.overwrite);
        } else if (calibrate->parsed()) {
            ExperimentConfig cfg = resolve(calib_args);
            if (!frequencies.empty()) cfg.sweep.frequencies = frequencies;
            if (maybe_explain(calib_args, cfg)) return 0;
            if (cfg.sweep.frequencies.empty()) {
                std::cerr << "calibrate: empty frequency list\n";
                return 1;
            }
            microswim::cmd_calibrate(cfg, microswim::resolve_output_dir(calib_args.output),
                                     calib_args.overwrite);
        }
    } catch (const microswim::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const microswim::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
