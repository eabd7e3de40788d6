#include "microswim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "microswim/csv.hpp"
#include "microswim/energetics.hpp"
#include "microswim/errors.hpp"
#include "microswim/gait.hpp"
#include "microswim/manifest.hpp"
#include "microswim/plot.hpp"
#include "microswim/rng.hpp"
#include "microswim/strouhal.hpp"

namespace microswim {

namespace fs = std::filesystem;

void prepare_run_dir(const fs::path& dir, bool overwrite) {
    if (fs::exists(dir)) {
        const bool empty = fs::is_directory(dir) && fs::begin(fs::directory_iterator(dir)) ==
                                                        fs::end(fs::directory_iterator(dir));
        if (!empty && !overwrite)
            throw DataError("output directory not empty: " + dir.string() +
                            " (pass --overwrite to reuse)");
        if (!fs::is_directory(dir))
            throw DataError("output path exists and is not a directory: " + dir.string());
    }
    fs::create_directories(dir);
}

std::filesystem::path resolve_output_dir(const std::string& requested) {
    fs::path p(requested);
    if (p.is_absolute()) return p;
    if (const char* root = std::getenv("MICROSWIM_OUTPUT_ROOT"); root && *root)
        return fs::path(root) / p;
    return p;
}

namespace {

/// best_policy.json: the winning parameter vector plus its network mapping.
void write_policy_json(const fs::path& path, const std::vector<double>& policy,
                       const CpgParams& params, double reward) {
    nlohmann::json j;
    j["policy"] = policy;
    j["reward"] = reward;
    j["cpg"] = {{"n", params.n},       {"tau", params.tau},         {"alpha", params.alpha},
                {"omega", params.omega}, {"beta", params.beta},     {"stimulus", params.stimulus}};
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

CpgParams read_policy_json(const fs::path& path, std::size_t dof) {
    std::ifstream in(path);
    if (!in) throw DataError("nominal policy file not found: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("unreadable policy file " + path.string() + ": " + e.what());
    }
    CpgParams p = CpgParams::defaults(dof);
    const auto& c = j.at("cpg");
    p.tau = c.at("tau").get<double>();
    p.alpha = c.value("alpha", p.alpha);
    p.omega = c.value("omega", p.omega);
    c.at("beta").get_to(p.beta);
    c.at("stimulus").get_to(p.stimulus);
    p.validate();
    if (p.n != dof || p.beta.size() != dof)
        throw DataError("policy file " + path.string() + " does not match design dof");
    return p;
}

}  // namespace

void cmd_learn(const ExperimentConfig& cfg, const fs::path& out_dir, bool overwrite) {
    const std::string started = iso_utc_now();
    prepare_run_dir(out_dir, overwrite);
    std::vector<std::string> produced;

    const PolicyDistribution base_init = initial_distribution(
        cfg.design.dof, cfg.learn.initial_frequency, cfg.learn.sigma_scale);

    LearningTrace best_trace;
    double best_reward = -1.0;
    for (std::size_t rep = 0; rep < std::max<std::size_t>(1, cfg.learn.repeat); ++rep) {
        // the paper's protocol restarts from varying initial values
        PolicyDistribution init = base_init;
        if (rep > 0 && cfg.learn.initial_jitter > 0.0) {
            Rng rng = Rng::substream(cfg.seed, "learn-init", rep);
            for (auto& m : init.mu) m += rng.normal(0.0, cfg.learn.initial_jitter * std::abs(m));
            init.mu[0] = std::max(init.mu[0], 2e-3);
        }
        LearnConfig lc = cfg.learn.core;
        lc.seed = Rng::substream(cfg.seed, "learn-repeat", rep).next_u64();
        const LearningTrace trace = run_learning(cfg.design, lc, init, cfg.sim);

        const std::string trace_name =
            rep == 0 ? "learning_trace.csv" : "learning_trace_" + std::to_string(rep + 1) + ".csv";
        write_learning_trace_csv(trace, out_dir / trace_name);
        produced.push_back(trace_name);

        const double reward = trace.episodes.back().best_speed;
        if (reward > best_reward) {
            best_reward = reward;
            best_trace = trace;
        }
    }

    const CpgParams best_params =
        params_from_policy(best_trace.best_policy, cfg.design.dof, CpgParams::defaults(cfg.design.dof));
    write_policy_json(out_dir / "best_policy.json", best_trace.best_policy, best_params,
                      best_reward);
    produced.push_back("best_policy.json");

    // final rollout of the winning policy, long enough for full gait metrics
    const double final_duration = std::max(16.0, cfg.learn.core.episode_duration);
    const Trajectory traj = simulate(cfg.design, best_params, final_duration,
                                     cfg.learn.core.sim_dt, cfg.seed, cfg.sim);
    write_trajectory_csv(traj, out_dir / "trajectory.csv");
    produced.push_back("trajectory.csv");
    GaitSummary summary;
    try {
        summary = compute_gait_metrics(traj, cfg.design, 3.0);
    } catch (const AperiodicSignal&) {
        summary = compute_gait_metrics(traj, cfg.design, 5.0);  // sub-1.5 Hz gaits
    }
    write_metrics_csv(summary.metrics, out_dir / "metrics.csv");
    produced.push_back("metrics.csv");

    write_manifest(out_dir, config_to_json(cfg), cfg.seed, started, produced);
}

void cmd_sweep(const ExperimentConfig& cfg, const fs::path& out_dir, bool overwrite) {
    if (cfg.sweep.frequencies.empty())
        throw DataError("sweep: no frequencies given (config sweep.frequencies or --frequencies)");
    const std::string started = iso_utc_now();
    prepare_run_dir(out_dir, overwrite);

    const std::size_t n = cfg.design.dof;
    std::vector<std::string> cols{"frequency_target", "tau", "frequency", "speed",
                                  "caudal_tip_velocity", "bcf_undulatory_velocity", "wave_index"};
    for (std::size_t j = 0; j < n; ++j) cols.push_back("m" + std::to_string(j + 1));
    for (std::size_t j = 0; j + 1 < n; ++j) cols.push_back("ip" + std::to_string(j + 1));
    cols.insert(cols.end(), {"power", "cot_net", "cot_w_net", "skipped"});

    CsvWriter sweep_csv(out_dir / "sweep.csv", "microswim.sweep.v1", cols);
    std::vector<WorkLoop> all_loops;
    std::vector<double> loop_freqs;
    std::vector<double> plot_f, plot_speed, plot_wave;

    SimConfig sim = cfg.sim;
    sim.dt = cfg.sweep.dt;

    for (const double f_target : cfg.sweep.frequencies) {
        std::vector<double> row;
        row.push_back(f_target);
        double tau = 0.0;
        GaitSummary s;
        double power = 0.0;
        CostOfTransport cot;
        Trajectory traj;
        try {
            tau = calibrate_tau(cfg.cpg, f_target);
            CpgParams params = cfg.cpg;
            params.tau = tau;
            // low targets need a longer window to cover >= 5 cycles, and the
            // spin-up from rest takes several seconds
            const double window = std::max(cfg.sweep.metrics_window, 5.5 / f_target);
            const double duration = std::max(cfg.sweep.duration, 3.2 * window + 6.0);
            traj = simulate(cfg.design, params, duration, sim.dt, cfg.seed, sim);
            s = compute_gait_metrics(traj, cfg.design, window);
            power = mean_total_power(traj, s.window);
            cot = cost_of_transport(power, std::max(s.metrics.speed, 1e-9),
                                    cfg.design.total_mass());
        } catch (const NumericalError&) {
            // uncalibratable or unanalyzable target: emit a skipped row
            row.insert(row.end(), cols.size() - 2, 0.0);
            row.push_back(1.0);
            sweep_csv.row(row);
            continue;
        }

        row.push_back(tau);
        row.push_back(s.metrics.frequency);
        row.push_back(s.metrics.speed);
        row.push_back(s.metrics.caudal_tip_velocity);
        row.push_back(s.metrics.bcf_undulatory_velocity);
        row.push_back(s.metrics.wave_index);
        for (double m : s.metrics.joint_amplitudes) row.push_back(m);
        for (double p : s.metrics.intersegmental_phases) row.push_back(p);
        row.push_back(power);
        row.push_back(cot.cot_net);
        row.push_back(cot.cot_w_net);
        row.push_back(0.0);
        sweep_csv.row(row);

        for (std::size_t j = 0; j < n; ++j) {
            all_loops.push_back(work_loop(traj, j, s.window));
            loop_freqs.push_back(f_target);
        }
        plot_f.push_back(f_target);
        plot_speed.push_back(s.metrics.speed);
        plot_wave.push_back(s.metrics.wave_index);
    }
    sweep_csv.close();
    std::vector<std::string> produced{"sweep.csv"};

    write_workloops_csv(all_loops, loop_freqs, out_dir / "workloops.csv");
    produced.push_back("workloops.csv");

    if (cfg.plots && !plot_f.empty()) {
        plot_lines_svg(out_dir / "sweep.svg", cfg.design_name + " frequency response",
                       "frequency [Hz]", "speed [m/s] / wave index", plot_f,
                       {{"speed", plot_speed}, {"wave_index", plot_wave}});
        produced.push_back("sweep.svg");
    }
    write_manifest(out_dir, config_to_json(cfg), cfg.seed, started, produced);
}

void cmd_disrupt(const ExperimentConfig& cfg, const fs::path& out_dir, bool overwrite) {
    const std::string started = iso_utc_now();

    CpgParams nominal = cfg.cpg;
    if (cfg.disrupt.policy_file) {
        nominal = read_policy_json(*cfg.disrupt.policy_file, cfg.design.dof);
    } else {
        const double f = cfg.disrupt.regime == GaitRegime::StandingWave
                             ? cfg.disrupt.sw_frequency
                             : cfg.disrupt.tw_frequency;
        nominal.tau = calibrate_tau(nominal, f);
    }

    prepare_run_dir(out_dir, overwrite);
    const SensitivityReport report =
        sensitivity_matrix(cfg.design, nominal, cfg.disrupt.regime, cfg.disrupt.repeats,
                           cfg.seed, cfg.disrupt.core, cfg.sim);
    write_sensitivity_csv(report, out_dir / "sensitivity.csv");
    std::vector<std::string> produced{"sensitivity.csv"};
    if (cfg.plots) {
        plot_heatmap_svg(out_dir / "heatmap.svg", report);
        produced.push_back("heatmap.svg");
    }
    write_manifest(out_dir, config_to_json(cfg), cfg.seed, started, produced);
}

void cmd_analyze(const ExperimentConfig& cfg, const fs::path& input_csv, const fs::path& out_dir,
                 bool overwrite) {
    const std::string started = iso_utc_now();
    const std::vector<SwimPoint> points = read_swim_points(input_csv);
    prepare_run_dir(out_dir, overwrite);
    std::vector<std::string> produced;
    std::ostringstream summary;

    if (cfg.analyze.mode == "st") {
        const ProportionalFit fit = fit_proportional(points);
        CsvWriter out(out_dir / "st_fit.csv", "microswim.st_fit.v1",
                      {"slope", "r_squared", "strouhal", "n_points", "single_point"});
        out.row({fit.slope, fit.r_squared, fit.strouhal, static_cast<double>(points.size()),
                 fit.single_point ? 1.0 : 0.0});
        out.close();
        produced.push_back("st_fit.csv");
        summary << "origin-constrained fit: V = " << format_double(fit.slope) << " * U\n"
                << "R^2 = " << format_double(fit.r_squared) << "\n"
                << "St = slope/2 = " << format_double(fit.strouhal) << "\n"
                << "points: " << points.size() << (fit.single_point ? " (single point)" : "")
                << "\n";
        if (cfg.plots) {
            std::vector<double> xs, ys;
            for (const auto& p : points) {
                xs.push_back(p.speed);
                ys.push_back(p.undulatory_velocity);
            }
            plot_scatter_svg(out_dir / "st_fit.svg", "speed vs undulatory velocity",
                             "speed U [m/s]", "undulation V [m/s]", xs, ys,
                             std::vector<std::size_t>(points.size(), 0), {fit.slope});
            produced.push_back("st_fit.svg");
        }
    } else {
        ClusterResult result =
            regression_cluster(points, cfg.analyze.k, cfg.analyze.restarts, cfg.seed);
        if (cfg.analyze.k >= 2) result.silhouette = silhouette_score(points, result).mean;
        const SilhouetteResult sil =
            cfg.analyze.k >= 2 ? silhouette_score(points, result) : SilhouetteResult{};

        CsvWriter out(out_dir / "clusters.csv", "microswim.clusters.v1",
                      {"label", "speed", "undulatory_velocity", "group", "line", "ratio",
                       "silhouette"});
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto& p = points[i];
            out.row_raw({p.label, format_double(p.speed), format_double(p.undulatory_velocity),
                         p.group, std::to_string(result.assignments[i]),
                         format_double(p.undulatory_velocity / p.speed),
                         format_double(cfg.analyze.k >= 2 ? sil.scores[i] : 0.0)});
        }
        out.close();
        produced.push_back("clusters.csv");

        summary << "regression clustering, k = " << cfg.analyze.k << ", restarts = "
                << cfg.analyze.restarts << "\n";
        for (std::size_t c = 0; c < result.slopes.size(); ++c)
            summary << "line " << c << ": slope = " << format_double(result.slopes[c])
                    << ", St = " << format_double(result.strouhal[c]) << "\n";
        summary << "normalized loss L_c = " << format_double(result.loss) << "\n";
        if (cfg.analyze.k >= 2)
            summary << "mean silhouette = " << format_double(result.silhouette) << "\n";
        if (cfg.plots) {
            std::vector<double> xs, ys;
            for (const auto& p : points) {
                xs.push_back(p.speed);
                ys.push_back(p.undulatory_velocity);
            }
            plot_scatter_svg(out_dir / "clusters.svg", "regression clustering", "speed U [m/s]",
                             "undulation V [m/s]", xs, ys, result.assignments, result.slopes);
            produced.push_back("clusters.svg");
        }
    }

    std::ofstream sum(out_dir / "summary.txt");
    sum << summary.str();
    sum.close();
    produced.push_back("summary.txt");
    write_manifest(out_dir, config_to_json(cfg), cfg.seed, started, produced);
}

void cmd_calibrate(const ExperimentConfig& cfg, const fs::path& out_dir, bool overwrite) {
    if (cfg.sweep.frequencies.empty())
        throw DataError("calibrate: no frequencies given (config sweep.frequencies or --frequencies)");
    const std::string started = iso_utc_now();
    prepare_run_dir(out_dir, overwrite);

    CsvWriter out(out_dir / "calibration.csv", "microswim.calibration.v1",
                  {"frequency_target", "tau", "frequency_measured", "relative_error"});
    for (const double f : cfg.sweep.frequencies) {
        const double tau = calibrate_tau(cfg.cpg, f);
        CpgParams p = cfg.cpg;
        p.tau = tau;
        const double measured = measure_cpg(p).frequency;
        out.row({f, tau, measured, std::abs(measured - f) / f});
    }
    out.close();
    write_manifest(out_dir, config_to_json(cfg), cfg.seed, started, {"calibration.csv"});
}

}  // namespace microswim
