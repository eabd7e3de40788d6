#include "microswim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "microswim/errors.hpp"

namespace microswim {

namespace {

using nlohmann::json;

[[noreturn]] void parse_error_with_line(const std::filesystem::path& path,
                                        const nlohmann::json::exception& e,
                                        const std::string& text) {
    // nlohmann reports a byte offset inside "at position N"; convert to a line
    std::string msg = e.what();
    std::size_t line = 1;
    const auto pos_at = msg.find("at position ");
    if (pos_at != std::string::npos) {
        const std::size_t off = std::stoul(msg.substr(pos_at + 12));
        for (std::size_t i = 0; i < off && i < text.size(); ++i)
            if (text[i] == '\n') ++line;
        msg += " (" + path.string() + ":" + std::to_string(line) + ")";
    } else {
        msg += " (" + path.string() + ")";
    }
    throw DataError(msg);
}

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw DataError("config: unknown key '" + it.key() + "' in " + where);
}

GaitRegime regime_from_string(const std::string& s) {
    if (s == "SW" || s == "sw" || s == "standing") return GaitRegime::StandingWave;
    if (s == "TW" || s == "tw" || s == "traveling") return GaitRegime::TravelingWave;
    throw DataError("config: disrupt.regime must be SW or TW, got '" + s + "'");
}

Task task_from_string(const std::string& s) {
    if (s == "forward") return Task::Forward;
    if (s == "backward") return Task::Backward;
    throw DataError("config: learn.task must be forward or backward, got '" + s + "'");
}

void apply_json(ExperimentConfig& cfg, const json& j) {
    reject_unknown_keys(j, {"design", "seed", "jobs", "plots", "sim", "cpg", "learn", "sweep",
                            "disrupt", "analyze"},
                        "top level");
    if (j.contains("design")) {
        if (j["design"].is_string()) {
            cfg.design_name = j["design"].get<std::string>();
            cfg.design = design_by_name(cfg.design_name);
        } else {
            j["design"].get_to(cfg.design);
            cfg.design_name = cfg.design.name.empty() ? "custom" : cfg.design.name;
        }
    }
    cfg.seed = j.value("seed", cfg.seed);
    cfg.jobs = j.value("jobs", cfg.jobs);
    cfg.plots = j.value("plots", cfg.plots);
    // population defaults scale with the resolved design; user keys override below
    default_population(cfg.design.dof, cfg.learn.core.samples, cfg.learn.core.elites);

    if (j.contains("sim")) {
        const json& s = j["sim"];
        reject_unknown_keys(s, {"dt", "control_rate", "voltage_scale", "v_max", "record_every",
                                "joint_stop", "stop_stiffness", "stop_damping", "cpg_init_noise"},
                            "sim");
        cfg.sim.dt = s.value("dt", cfg.sim.dt);
        cfg.sim.control_rate = s.value("control_rate", cfg.sim.control_rate);
        cfg.sim.voltage_scale = s.value("voltage_scale", cfg.sim.voltage_scale);
        cfg.sim.v_max = s.value("v_max", cfg.sim.v_max);
        cfg.sim.record_every = s.value("record_every", cfg.sim.record_every);
        cfg.sim.joint_stop = s.value("joint_stop", cfg.sim.joint_stop);
        cfg.sim.stop_stiffness = s.value("stop_stiffness", cfg.sim.stop_stiffness);
        cfg.sim.stop_damping = s.value("stop_damping", cfg.sim.stop_damping);
        cfg.sim.cpg_init_noise = s.value("cpg_init_noise", cfg.sim.cpg_init_noise);
    }

    cfg.cpg = CpgParams::defaults(cfg.design.dof);
    if (j.contains("cpg")) {
        const json& c = j["cpg"];
        reject_unknown_keys(c, {"tau", "alpha", "omega", "beta", "stimulus"}, "cpg");
        cfg.cpg.tau = c.value("tau", cfg.cpg.tau);
        cfg.cpg.alpha = c.value("alpha", cfg.cpg.alpha);
        cfg.cpg.omega = c.value("omega", cfg.cpg.omega);
        if (c.contains("beta")) {
            if (c["beta"].is_number())
                cfg.cpg.beta.assign(cfg.design.dof, c["beta"].get<double>());
            else
                c["beta"].get_to(cfg.cpg.beta);
        }
        if (c.contains("stimulus")) {
            if (c["stimulus"].is_number())
                cfg.cpg.stimulus.assign(cfg.design.dof, c["stimulus"].get<double>());
            else
                c["stimulus"].get_to(cfg.cpg.stimulus);
        }
        cfg.cpg.validate();
    }

    if (j.contains("learn")) {
        const json& l = j["learn"];
        reject_unknown_keys(l, {"samples", "elites", "task", "episode_duration", "sim_dt",
                                "convergence_window", "convergence_threshold", "max_episodes",
                                "repeat", "initial_frequency", "sigma_scale", "initial_jitter"},
                            "learn");
        cfg.learn.core.samples = l.value("samples", cfg.learn.core.samples);
        cfg.learn.core.elites = l.value("elites", cfg.learn.core.elites);
        if (l.contains("task")) cfg.learn.core.task = task_from_string(l["task"]);
        cfg.learn.core.episode_duration =
            l.value("episode_duration", cfg.learn.core.episode_duration);
        cfg.learn.core.sim_dt = l.value("sim_dt", cfg.learn.core.sim_dt);
        cfg.learn.core.convergence_window =
            l.value("convergence_window", cfg.learn.core.convergence_window);
        cfg.learn.core.convergence_threshold =
            l.value("convergence_threshold", cfg.learn.core.convergence_threshold);
        cfg.learn.core.max_episodes = l.value("max_episodes", cfg.learn.core.max_episodes);
        cfg.learn.repeat = l.value("repeat", cfg.learn.repeat);
        cfg.learn.initial_frequency = l.value("initial_frequency", cfg.learn.initial_frequency);
        cfg.learn.sigma_scale = l.value("sigma_scale", cfg.learn.sigma_scale);
        cfg.learn.initial_jitter = l.value("initial_jitter", cfg.learn.initial_jitter);
    }

    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        reject_unknown_keys(s, {"frequencies", "duration", "dt", "metrics_window"}, "sweep");
        if (s.contains("frequencies")) s["frequencies"].get_to(cfg.sweep.frequencies);
        cfg.sweep.duration = s.value("duration", cfg.sweep.duration);
        cfg.sweep.dt = s.value("dt", cfg.sweep.dt);
        cfg.sweep.metrics_window = s.value("metrics_window", cfg.sweep.metrics_window);
    }

    if (j.contains("disrupt")) {
        const json& d = j["disrupt"];
        reject_unknown_keys(d, {"regime", "repeats", "sw_frequency", "tw_frequency",
                                "policy_file", "intensity_magnitude", "phase_magnitude",
                                "frequency_magnitude", "sim_duration", "sim_dt",
                                "metrics_window"},
                            "disrupt");
        if (d.contains("regime")) cfg.disrupt.regime = regime_from_string(d["regime"]);
        cfg.disrupt.repeats = d.value("repeats", cfg.disrupt.repeats);
        cfg.disrupt.sw_frequency = d.value("sw_frequency", cfg.disrupt.sw_frequency);
        cfg.disrupt.tw_frequency = d.value("tw_frequency", cfg.disrupt.tw_frequency);
        if (d.contains("policy_file")) cfg.disrupt.policy_file = d["policy_file"].get<std::string>();
        cfg.disrupt.core.intensity_magnitude =
            d.value("intensity_magnitude", cfg.disrupt.core.intensity_magnitude);
        cfg.disrupt.core.phase_magnitude =
            d.value("phase_magnitude", cfg.disrupt.core.phase_magnitude);
        cfg.disrupt.core.frequency_magnitude =
            d.value("frequency_magnitude", cfg.disrupt.core.frequency_magnitude);
        cfg.disrupt.core.sim_duration = d.value("sim_duration", cfg.disrupt.core.sim_duration);
        cfg.disrupt.core.sim_dt = d.value("sim_dt", cfg.disrupt.core.sim_dt);
        cfg.disrupt.core.metrics_window =
            d.value("metrics_window", cfg.disrupt.core.metrics_window);
    }

    if (j.contains("analyze")) {
        const json& a = j["analyze"];
        reject_unknown_keys(a, {"mode", "k", "restarts"}, "analyze");
        cfg.analyze.mode = a.value("mode", cfg.analyze.mode);
        cfg.analyze.k = a.value("k", cfg.analyze.k);
        cfg.analyze.restarts = a.value("restarts", cfg.analyze.restarts);
        if (cfg.analyze.mode != "st" && cfg.analyze.mode != "cluster")
            throw DataError("config: analyze.mode must be st or cluster");
    }
}

void finalize(ExperimentConfig& cfg) {
    auto violations = validate_design(cfg.design);
    if (!violations.empty())
        throw DataError("config: invalid design: " + violations.front());
    if (cfg.cpg.n != cfg.design.dof) {
        CpgParams fresh = CpgParams::defaults(cfg.design.dof);
        fresh.tau = cfg.cpg.tau;
        fresh.alpha = cfg.cpg.alpha;
        fresh.omega = cfg.cpg.omega;
        cfg.cpg = fresh;
    }
    cfg.learn.core.seed = cfg.seed;
    cfg.learn.core.jobs = cfg.jobs;
    cfg.disrupt.core.jobs = cfg.jobs;
    if (cfg.learn.core.elites > cfg.learn.core.samples)
        throw DataError("config: learn.elites must be <= learn.samples");
}

}  // namespace

ExperimentConfig default_config(const std::string& design_name) {
    ExperimentConfig cfg;
    cfg.design_name = design_name;
    cfg.design = design_by_name(design_name);
    cfg.cpg = CpgParams::defaults(cfg.design.dof);
    default_population(cfg.design.dof, cfg.learn.core.samples, cfg.learn.core.elites);
    finalize(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        parse_error_with_line(path, e, text);
    }

    ExperimentConfig cfg;
    cfg.design = design_by_name(cfg.design_name);
    default_population(cfg.design.dof, cfg.learn.core.samples, cfg.learn.core.elites);
    try {
        apply_json(cfg, j);
    } catch (const json::exception& e) {
        throw DataError(std::string("config: ") + e.what() + " (" + path.string() + ")");
    }
    finalize(cfg);
    return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["design"] = cfg.design;
    j["seed"] = cfg.seed;
    j["jobs"] = cfg.jobs;
    j["plots"] = cfg.plots;
    j["sim"] = {{"dt", cfg.sim.dt},
                {"control_rate", cfg.sim.control_rate},
                {"voltage_scale", cfg.sim.voltage_scale},
                {"v_max", cfg.sim.v_max},
                {"record_every", cfg.sim.record_every},
                {"joint_stop", cfg.sim.joint_stop},
                {"stop_stiffness", cfg.sim.stop_stiffness},
                {"stop_damping", cfg.sim.stop_damping},
                {"cpg_init_noise", cfg.sim.cpg_init_noise}};
    j["cpg"] = {{"tau", cfg.cpg.tau},
                {"alpha", cfg.cpg.alpha},
                {"omega", cfg.cpg.omega},
                {"beta", cfg.cpg.beta},
                {"stimulus", cfg.cpg.stimulus}};
    j["learn"] = {{"samples", cfg.learn.core.samples},
                  {"elites", cfg.learn.core.elites},
                  {"task", cfg.learn.core.task == Task::Forward ? "forward" : "backward"},
                  {"episode_duration", cfg.learn.core.episode_duration},
                  {"sim_dt", cfg.learn.core.sim_dt},
                  {"convergence_window", cfg.learn.core.convergence_window},
                  {"convergence_threshold", cfg.learn.core.convergence_threshold},
                  {"max_episodes", cfg.learn.core.max_episodes},
                  {"repeat", cfg.learn.repeat},
                  {"initial_frequency", cfg.learn.initial_frequency},
                  {"sigma_scale", cfg.learn.sigma_scale},
                  {"initial_jitter", cfg.learn.initial_jitter}};
    j["sweep"] = {{"frequencies", cfg.sweep.frequencies},
                  {"duration", cfg.sweep.duration},
                  {"dt", cfg.sweep.dt},
                  {"metrics_window", cfg.sweep.metrics_window}};
    j["disrupt"] = {{"regime", cfg.disrupt.regime == GaitRegime::StandingWave ? "SW" : "TW"},
                    {"repeats", cfg.disrupt.repeats},
                    {"sw_frequency", cfg.disrupt.sw_frequency},
                    {"tw_frequency", cfg.disrupt.tw_frequency},
                    {"intensity_magnitude", cfg.disrupt.core.intensity_magnitude},
                    {"phase_magnitude", cfg.disrupt.core.phase_magnitude},
                    {"frequency_magnitude", cfg.disrupt.core.frequency_magnitude},
                    {"sim_duration", cfg.disrupt.core.sim_duration},
                    {"sim_dt", cfg.disrupt.core.sim_dt},
                    {"metrics_window", cfg.disrupt.core.metrics_window}};
    if (cfg.disrupt.policy_file) j["disrupt"]["policy_file"] = *cfg.disrupt.policy_file;
    j["analyze"] = {{"mode", cfg.analyze.mode}, {"k", cfg.analyze.k},
                    {"restarts", cfg.analyze.restarts}};
    return j;
}

std::string explain_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "# Resolved configuration (all defaults applied)\n"
        << "#\n"
        << "# design: catalog name or inline object (lengths/masses per link)\n"
        << "# seed: root seed; every stochastic call site derives a labeled substream\n"
        << "# jobs: parallel rollouts/cells; results aggregate by index\n"
        << "# sim.dt: integration step [s]; sim.control_rate: voltage update [Hz]\n"
        << "# sim.voltage_scale: volts per CPG output unit; sim.v_max: command clamp [V]\n"
        << "# cpg: fixed network parameters (alpha, omega, per-module beta, stimulus)\n"
        << "# learn: M samples / K elites, reward task, convergence rule\n"
        << "#   (best-speed changes < threshold across `convergence_window` episodes)\n"
        << "# sweep.frequencies: targets for tau calibration [Hz]\n"
        << "# disrupt: regime SW|TW picks sw_frequency/tw_frequency for nominal tau;\n"
        << "#   magnitudes are relative (intensity/frequency) or radians (phase)\n"
        << "# analyze: st = origin fit + Strouhal; cluster = k regression lines\n"
        << config_to_json(cfg).dump(2) << "\n";
    return out.str();
}

}  // namespace microswim
