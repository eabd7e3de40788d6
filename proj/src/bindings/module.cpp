#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "microswim/cpg.hpp"
#include "microswim/energetics.hpp"
#include "microswim/ephe.hpp"
#include "microswim/errors.hpp"
#include "microswim/gait.hpp"
#include "microswim/manifest.hpp"
#include "microswim/robot.hpp"
#include "microswim/sensitivity.hpp"
#include "microswim/sim.hpp"
#include "microswim/strouhal.hpp"

namespace py = pybind11;
using namespace microswim;

PYBIND11_MODULE(_core, m) {
    m.doc() = "CPG-driven undulatory swimmer lab: simulation, learning, analysis";
    m.attr("__version__") = kArtifactVersion;

    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    // --- cpg ---
    py::class_<CpgParams>(m, "CpgParams")
        .def(py::init<>())
        .def_static("defaults", &CpgParams::defaults, py::arg("n_modules"))
        .def_readwrite("n", &CpgParams::n)
        .def_readwrite("tau", &CpgParams::tau)
        .def_readwrite("beta", &CpgParams::beta)
        .def_readwrite("stimulus", &CpgParams::stimulus)
        .def_readwrite("alpha", &CpgParams::alpha)
        .def_readwrite("omega", &CpgParams::omega)
        .def("validate", &CpgParams::validate);

    py::class_<CpgState>(m, "CpgState")
        .def(py::init<>())
        .def_static("zero", &CpgState::zero, py::arg("n_modules"))
        .def_readwrite("u", &CpgState::u)
        .def_readwrite("v", &CpgState::v)
        .def("finite", &CpgState::finite);

    py::class_<SignalTrace>(m, "SignalTrace")
        .def_readonly("sample_rate", &SignalTrace::sample_rate)
        .def_readonly("outputs", &SignalTrace::outputs);

    py::class_<SignalMetrics>(m, "SignalMetrics")
        .def_readonly("frequency", &SignalMetrics::frequency)
        .def_readonly("intensities", &SignalMetrics::intensities)
        .def_readonly("phases", &SignalMetrics::phases);

    m.def("cpg_step", &cpg_step, py::arg("state"), py::arg("params"), py::arg("dt"),
          py::arg("step_index") = 0);
    m.def("cpg_run", &cpg_run, py::arg("params"), py::arg("duration"), py::arg("dt"),
          py::arg("initial"), py::arg("sample_rate") = 0.0);
    m.def("signal_metrics", &signal_metrics, py::arg("trace"));
    m.def("measure_cpg", &measure_cpg, py::arg("params"), py::arg("dt") = 0.0);
    m.def(
        "calibrate_tau",
        [](const CpgParams& p, double f) { return calibrate_tau(p, f); },
        py::arg("params"), py::arg("target_frequency"));

    // --- robot ---
    py::class_<HydroCoeffs>(m, "HydroCoeffs")
        .def(py::init<>())
        .def_readwrite("fluid_density", &HydroCoeffs::fluid_density)
        .def_readwrite("normal_drag", &HydroCoeffs::normal_drag)
        .def_readwrite("tangential_drag", &HydroCoeffs::tangential_drag)
        .def_readwrite("added_mass_factor", &HydroCoeffs::added_mass_factor)
        .def_readwrite("tail_reactive_factor", &HydroCoeffs::tail_reactive_factor);

    py::class_<RobotDesign>(m, "RobotDesign")
        .def(py::init<>())
        .def_readwrite("name", &RobotDesign::name)
        .def_readwrite("dof", &RobotDesign::dof)
        .def_readwrite("segment_lengths", &RobotDesign::segment_lengths)
        .def_readwrite("segment_masses", &RobotDesign::segment_masses)
        .def_readwrite("width", &RobotDesign::width)
        .def_readwrite("depth", &RobotDesign::depth)
        .def_readwrite("joint_passive_stiffness", &RobotDesign::joint_passive_stiffness)
        .def_readwrite("joint_passive_damping", &RobotDesign::joint_passive_damping)
        .def_readwrite("motor_gain", &RobotDesign::motor_gain)
        .def_readwrite("motor_damping", &RobotDesign::motor_damping)
        .def_readwrite("torque_limit", &RobotDesign::torque_limit)
        .def_readwrite("hydro", &RobotDesign::hydro)
        .def_readwrite("has_caudal_fin", &RobotDesign::has_caudal_fin)
        .def_property_readonly("total_length", &RobotDesign::total_length)
        .def_property_readonly("total_mass", &RobotDesign::total_mass)
        .def_property_readonly("link_count", &RobotDesign::link_count)
        .def_property_readonly("joint_count", &RobotDesign::joint_count);

    m.def("standard_design", &standard_design, py::arg("dof"), py::arg("with_fin"),
          py::arg("shares") = StandardShares{});
    py::class_<StandardShares>(m, "StandardShares")
        .def(py::init<>())
        .def_readwrite("head", &StandardShares::head)
        .def_readwrite("fin", &StandardShares::fin);
    m.def("design_by_name", &design_by_name, py::arg("name"));
    m.def("validate_design", &validate_design, py::arg("design"));

    // --- sim ---
    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("dt", &SimConfig::dt)
        .def_readwrite("control_rate", &SimConfig::control_rate)
        .def_readwrite("voltage_scale", &SimConfig::voltage_scale)
        .def_readwrite("v_max", &SimConfig::v_max)
        .def_readwrite("record_every", &SimConfig::record_every)
        .def_readwrite("joint_stop", &SimConfig::joint_stop)
        .def_readwrite("stop_stiffness", &SimConfig::stop_stiffness)
        .def_readwrite("stop_damping", &SimConfig::stop_damping)
        .def_readwrite("cpg_init_noise", &SimConfig::cpg_init_noise);

    py::class_<SimState>(m, "SimState")
        .def(py::init<>())
        .def_static("rest", &SimState::rest, py::arg("design"))
        .def_readwrite("base_x", &SimState::base_x)
        .def_readwrite("base_y", &SimState::base_y)
        .def_readwrite("base_heading", &SimState::base_heading)
        .def_readwrite("joint_angles", &SimState::joint_angles)
        .def_readwrite("base_vx", &SimState::base_vx)
        .def_readwrite("base_vy", &SimState::base_vy)
        .def_readwrite("base_angular_velocity", &SimState::base_angular_velocity)
        .def_readwrite("joint_velocities", &SimState::joint_velocities);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("sample_dt", &Trajectory::sample_dt)
        .def_readonly("time", &Trajectory::time)
        .def_readonly("marker_x", &Trajectory::marker_x)
        .def_readonly("marker_y", &Trajectory::marker_y)
        .def_readonly("joint_angles", &Trajectory::joint_angles)
        .def_readonly("joint_torques", &Trajectory::joint_torques)
        .def_readonly("voltages", &Trajectory::voltages)
        .def_readonly("hydro_dissipation", &Trajectory::hydro_dissipation)
        .def_readonly("passive_dissipation", &Trajectory::passive_dissipation)
        .def_readonly("wake_energy", &Trajectory::wake_energy)
        .def_readonly("kinetic_energy", &Trajectory::kinetic_energy)
        .def_readonly("spring_energy", &Trajectory::spring_energy)
        .def_readonly("joint_limit_steps", &Trajectory::joint_limit_steps)
        .def_property_readonly("frame_count", &Trajectory::frame_count)
        .def_property_readonly("marker_count", &Trajectory::marker_count);

    m.def("motor_torque", &motor_torque, py::arg("voltage"), py::arg("joint_velocity"),
          py::arg("design"));
    m.def("simulate", &simulate, py::arg("design"), py::arg("cpg_params"), py::arg("duration"),
          py::arg("dt"), py::arg("seed"), py::arg("config") = SimConfig{});
    py::class_<EnergyAudit>(m, "EnergyAudit")
        .def_readonly("actuator_work", &EnergyAudit::actuator_work)
        .def_readonly("delta_kinetic", &EnergyAudit::delta_kinetic)
        .def_readonly("delta_spring", &EnergyAudit::delta_spring)
        .def_readonly("hydro_dissipation", &EnergyAudit::hydro_dissipation)
        .def_readonly("passive_dissipation", &EnergyAudit::passive_dissipation)
        .def_readonly("wake_energy", &EnergyAudit::wake_energy)
        .def_readonly("residual", &EnergyAudit::residual)
        .def_readonly("residual_ratio", &EnergyAudit::residual_ratio);
    m.def("energy_audit", &energy_audit, py::arg("trajectory"), py::arg("design"));
    m.def("write_trajectory_csv", &write_trajectory_csv, py::arg("trajectory"), py::arg("path"));

    // --- gait ---
    py::class_<SteadyWindow>(m, "SteadyWindow")
        .def_readonly("begin_frame", &SteadyWindow::begin_frame)
        .def_readonly("end_frame", &SteadyWindow::end_frame)
        .def_readonly("t_begin", &SteadyWindow::t_begin)
        .def_readonly("t_end", &SteadyWindow::t_end)
        .def_readonly("fallback", &SteadyWindow::fallback);
    m.def("steady_window", &steady_window, py::arg("trajectory"), py::arg("window_seconds"));

    py::class_<GaitMetrics>(m, "GaitMetrics")
        .def_readonly("speed", &GaitMetrics::speed)
        .def_readonly("frequency", &GaitMetrics::frequency)
        .def_readonly("joint_amplitudes", &GaitMetrics::joint_amplitudes)
        .def_readonly("intersegmental_phases", &GaitMetrics::intersegmental_phases)
        .def_readonly("caudal_tip_velocity", &GaitMetrics::caudal_tip_velocity)
        .def_readonly("bcf_undulatory_velocity", &GaitMetrics::bcf_undulatory_velocity)
        .def_readonly("wave_index", &GaitMetrics::wave_index);
    py::class_<GaitSummary>(m, "GaitSummary")
        .def_readonly("metrics", &GaitSummary::metrics)
        .def_readonly("window", &GaitSummary::window)
        .def_readonly("flags", &GaitSummary::flags);
    m.def("compute_gait_metrics", &compute_gait_metrics, py::arg("trajectory"),
          py::arg("design"), py::arg("window_seconds") = 2.0);
    m.def(
        "mean_bcf_undulatory_velocity",
        [](const Trajectory& t, const SteadyWindow& w) {
            return mean_bcf_undulatory_velocity(t, w);
        },
        py::arg("trajectory"), py::arg("window"));
    m.def(
        "caudal_tip_velocity",
        [](const Trajectory& t, const SteadyWindow& w) { return caudal_tip_velocity(t, w); },
        py::arg("trajectory"), py::arg("window"));
    py::class_<WaveDecomposition>(m, "WaveDecomposition")
        .def_readonly("index", &WaveDecomposition::index)
        .def_readonly("node_positions", &WaveDecomposition::node_positions);
    m.def("wave_index", &wave_index, py::arg("trajectory"), py::arg("window"));

    // --- ephe ---
    py::class_<PolicyDistribution>(m, "PolicyDistribution")
        .def(py::init<>())
        .def_readwrite("mu", &PolicyDistribution::mu)
        .def_readwrite("sigma", &PolicyDistribution::sigma);
    py::enum_<Task>(m, "Task").value("Forward", Task::Forward).value("Backward", Task::Backward);
    py::class_<LearnConfig>(m, "LearnConfig")
        .def(py::init<>())
        .def_readwrite("samples", &LearnConfig::samples)
        .def_readwrite("elites", &LearnConfig::elites)
        .def_readwrite("task", &LearnConfig::task)
        .def_readwrite("episode_duration", &LearnConfig::episode_duration)
        .def_readwrite("sim_dt", &LearnConfig::sim_dt)
        .def_readwrite("convergence_window", &LearnConfig::convergence_window)
        .def_readwrite("convergence_threshold", &LearnConfig::convergence_threshold)
        .def_readwrite("max_episodes", &LearnConfig::max_episodes)
        .def_readwrite("seed", &LearnConfig::seed)
        .def_readwrite("jobs", &LearnConfig::jobs);
    py::class_<EpisodeRecord>(m, "EpisodeRecord")
        .def_readonly("episode", &EpisodeRecord::episode)
        .def_readonly("samples", &EpisodeRecord::samples)
        .def_readonly("rewards", &EpisodeRecord::rewards)
        .def_readonly("updated", &EpisodeRecord::updated)
        .def_readonly("best_speed", &EpisodeRecord::best_speed)
        .def_readonly("mean_reward", &EpisodeRecord::mean_reward)
        .def_readonly("best_index", &EpisodeRecord::best_index);
    py::class_<LearningTrace>(m, "LearningTrace")
        .def_readonly("episodes", &LearningTrace::episodes)
        .def_readonly("final_distribution", &LearningTrace::final_distribution)
        .def_readonly("best_policy", &LearningTrace::best_policy)
        .def_readonly("converged", &LearningTrace::converged);

    m.def("sample_policies", &sample_policies, py::arg("dist"), py::arg("count"), py::arg("seed"));
    m.def("ephe_update", &ephe_update, py::arg("samples"), py::arg("rewards"), py::arg("elites"));
    m.def(
        "episode_reward",
        [](const Trajectory& t, Task task) { return episode_reward(t, task); },
        py::arg("trajectory"), py::arg("task"));
    m.def(
        "run_learning",
        [](const std::function<double(std::vector<double>)>& env, const LearnConfig& cfg,
           const PolicyDistribution& init) {
            return run_learning(
                [&](std::span<const double> v, std::uint64_t) {
                    return env(std::vector<double>(v.begin(), v.end()));
                },
                cfg, init);
        },
        py::arg("reward_fn"), py::arg("config"), py::arg("initial"),
        "Episodic search over an arbitrary reward callable");
    m.def(
        "run_learning_sim",
        [](const RobotDesign& d, const LearnConfig& cfg, const PolicyDistribution& init,
           const SimConfig& sim) { return run_learning(d, cfg, init, sim); },
        py::arg("design"), py::arg("config"), py::arg("initial"),
        py::arg("sim_config") = SimConfig{});
    m.def("params_from_policy",
          [](const std::vector<double>& v, std::size_t n, const CpgParams& base) {
              return params_from_policy(v, n, base);
          },
          py::arg("policy"), py::arg("n_modules"), py::arg("base"));
    m.def("initial_distribution", &initial_distribution, py::arg("n_modules"),
          py::arg("target_frequency") = 4.0, py::arg("sigma_scale") = 0.3);

    // --- strouhal ---
    py::class_<SwimPoint>(m, "SwimPoint")
        .def(py::init<>())
        .def(py::init([](std::string label, double speed, double vel, std::string group) {
                 SwimPoint p;
                 p.label = std::move(label);
                 p.speed = speed;
                 p.undulatory_velocity = vel;
                 p.group = std::move(group);
                 return p;
             }),
             py::arg("label"), py::arg("speed"), py::arg("undulatory_velocity"),
             py::arg("group") = "")
        .def_readwrite("label", &SwimPoint::label)
        .def_readwrite("speed", &SwimPoint::speed)
        .def_readwrite("undulatory_velocity", &SwimPoint::undulatory_velocity)
        .def_readwrite("group", &SwimPoint::group);
    py::class_<ProportionalFit>(m, "ProportionalFit")
        .def_readonly("slope", &ProportionalFit::slope)
        .def_readonly("r_squared", &ProportionalFit::r_squared)
        .def_readonly("strouhal", &ProportionalFit::strouhal)
        .def_readonly("single_point", &ProportionalFit::single_point);
    py::class_<ClusterResult>(m, "ClusterResult")
        .def_readonly("slopes", &ClusterResult::slopes)
        .def_readonly("strouhal", &ClusterResult::strouhal)
        .def_readonly("assignments", &ClusterResult::assignments)
        .def_readonly("loss", &ClusterResult::loss)
        .def_readonly("loss_history", &ClusterResult::loss_history);
    py::class_<SilhouetteResult>(m, "SilhouetteResult")
        .def_readonly("scores", &SilhouetteResult::scores)
        .def_readonly("mean", &SilhouetteResult::mean);
    m.def("strouhal_bcf", &strouhal_bcf, py::arg("undulatory_velocity"), py::arg("speed"));
    m.def("fit_proportional", &fit_proportional, py::arg("points"));
    m.def("regression_cluster", &regression_cluster, py::arg("points"), py::arg("k"),
          py::arg("restarts") = 20, py::arg("seed") = 1);
    m.def("silhouette_score", &silhouette_score, py::arg("points"), py::arg("result"));
    m.def("read_swim_points", &read_swim_points, py::arg("path"));

    // --- energetics ---
    py::enum_<ActuatorClass>(m, "ActuatorClass")
        .value("Motor", ActuatorClass::Motor)
        .value("Brake", ActuatorClass::Brake)
        .value("VirtualSpring", ActuatorClass::VirtualSpring)
        .value("VirtualMass", ActuatorClass::VirtualMass);
    py::class_<WorkLoop>(m, "WorkLoop")
        .def_readonly("joint", &WorkLoop::joint)
        .def_readonly("angle", &WorkLoop::angle)
        .def_readonly("torque", &WorkLoop::torque)
        .def_readonly("net_work", &WorkLoop::net_work)
        .def_readonly("normalized_area", &WorkLoop::normalized_area)
        .def_readonly("inclination", &WorkLoop::inclination)
        .def_readonly("frequency", &WorkLoop::frequency)
        .def_readonly("cycles", &WorkLoop::cycles)
        .def_readonly("trimmed", &WorkLoop::trimmed)
        .def_readonly("classification", &WorkLoop::classification);
    m.def("work_loop", &work_loop, py::arg("trajectory"), py::arg("joint"), py::arg("window"));
    m.def("classify_actuator", &classify_actuator, py::arg("loop"),
          py::arg("area_threshold") = 0.3);
    m.def("mean_total_power", &mean_total_power, py::arg("trajectory"), py::arg("window"));
    py::class_<CostOfTransport>(m, "CostOfTransport")
        .def_readonly("cot_net", &CostOfTransport::cot_net)
        .def_readonly("cot_w_net", &CostOfTransport::cot_w_net);
    m.def("cost_of_transport", &cost_of_transport, py::arg("power"), py::arg("speed"),
          py::arg("mass"));

    // --- sensitivity ---
    py::enum_<DisruptionKind>(m, "DisruptionKind")
        .value("Intensity", DisruptionKind::Intensity)
        .value("IntersegmentalPhase", DisruptionKind::IntersegmentalPhase)
        .value("FrequencyUp", DisruptionKind::FrequencyUp)
        .value("FrequencyDown", DisruptionKind::FrequencyDown);
    py::class_<DisruptionSpec>(m, "DisruptionSpec")
        .def(py::init<>())
        .def_readwrite("kind", &DisruptionSpec::kind)
        .def_readwrite("target", &DisruptionSpec::target)
        .def_readwrite("magnitude", &DisruptionSpec::magnitude)
        .def("label", &DisruptionSpec::label);
    py::enum_<GaitRegime>(m, "GaitRegime")
        .value("StandingWave", GaitRegime::StandingWave)
        .value("TravelingWave", GaitRegime::TravelingWave);
    py::class_<SensitivityValue>(m, "SensitivityValue")
        .def_readonly("value", &SensitivityValue::value)
        .def_readonly("absolute_variant", &SensitivityValue::absolute_variant);
    m.def("sensitivity_index", &sensitivity_index, py::arg("nominal_output"),
          py::arg("disrupted_output"), py::arg("input_relative_change"),
          py::arg("output_is_phase") = false);
    py::class_<SensitivityConfig>(m, "SensitivityConfig")
        .def(py::init<>())
        .def_readwrite("intensity_magnitude", &SensitivityConfig::intensity_magnitude)
        .def_readwrite("phase_magnitude", &SensitivityConfig::phase_magnitude)
        .def_readwrite("frequency_magnitude", &SensitivityConfig::frequency_magnitude)
        .def_readwrite("sim_duration", &SensitivityConfig::sim_duration)
        .def_readwrite("sim_dt", &SensitivityConfig::sim_dt)
        .def_readwrite("metrics_window", &SensitivityConfig::metrics_window)
        .def_readwrite("jobs", &SensitivityConfig::jobs);
    py::class_<SensitivityReport>(m, "SensitivityReport")
        .def_readonly("row_labels", &SensitivityReport::row_labels)
        .def_readonly("col_labels", &SensitivityReport::col_labels)
        .def_readonly("mean", &SensitivityReport::mean)
        .def_readonly("stddev", &SensitivityReport::stddev)
        .def_readonly("valid", &SensitivityReport::valid)
        .def_readonly("repeats", &SensitivityReport::repeats)
        .def_readonly("display_clamp", &SensitivityReport::display_clamp);
    m.def("sensitivity_matrix", &sensitivity_matrix, py::arg("design"), py::arg("nominal"),
          py::arg("regime"), py::arg("repeats"), py::arg("seed"),
          py::arg("config") = SensitivityConfig{}, py::arg("sim_config") = SimConfig{});
}
