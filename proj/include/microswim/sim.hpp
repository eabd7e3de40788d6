#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "microswim/cpg.hpp"
#include "microswim/robot.hpp"
#include "microswim/signal.hpp"

namespace microswim {

/// Planar pose/rates of the articulated chain. Angles are hinge deflections
/// between consecutive links (positive = leftward bend), heading is the head
/// link angle in the lab frame.
struct SimState {
    double base_x = 0.0, base_y = 0.0;       ///< head link center, m
    double base_heading = 0.0;               ///< rad
    std::vector<double> joint_angles;        ///< rad, one per joint (incl. passive fin joint)
    double base_vx = 0.0, base_vy = 0.0;     ///< m/s
    double base_angular_velocity = 0.0;      ///< rad/s
    std::vector<double> joint_velocities;    ///< rad/s

    static SimState rest(const RobotDesign& design);
    bool finite() const;
};

/// Simulation knobs that are not robot properties.
struct SimConfig {
    double dt = 1e-4;             ///< integration step, s (must be <= 1e-3)
    double control_rate = 50.0;   ///< Hz voltage update rate (0 = every step)
    double voltage_scale = 1.0;   ///< volts per CPG output unit
    double v_max = 5.0;           ///< command clamp, volts
    int record_every = 1;         ///< store every k-th integration step
    double joint_stop = 1.5707963267948966;  ///< software stop, rad (pi/2)
    double stop_stiffness = 0.5;  ///< N*m/rad penalty beyond the stop
    double stop_damping = 2e-3;   ///< N*m*s/rad while beyond the stop
    double cpg_init_noise = 1e-3; ///< seed-driven initial-state perturbation scale
};

/// Recorded run: kinematic markers, joint channels and energy ledgers.
/// Channel-major layout ([channel][frame]) for analysis slicing. Markers are
/// ordered head -> tail: each link's midpoint, each joint, and the posterior
/// tip of the last link (the caudal-fin tip when a fin is present).
struct Trajectory {
    double sample_dt = 0.0;                          ///< spacing of frames, s
    std::vector<double> time;                        ///< s
    std::vector<std::vector<double>> marker_x;       ///< [marker][frame], m
    std::vector<std::vector<double>> marker_y;       ///< [marker][frame], m
    std::vector<std::vector<double>> joint_angles;   ///< [joint][frame], rad
    std::vector<std::vector<double>> joint_torques;  ///< [actuated joint][frame], N*m
    std::vector<std::vector<double>> voltages;       ///< [actuated joint][frame], V
    std::vector<double> hydro_dissipation;           ///< J per frame interval, >= 0
    std::vector<double> passive_dissipation;         ///< J per frame interval, >= 0
    std::vector<double> wake_energy;                 ///< J shed at the tail tip per interval
    std::vector<double> kinetic_energy;              ///< J at frame (body + added mass)
    std::vector<double> spring_energy;               ///< J at frame (passive + stop springs)
    std::vector<long> joint_limit_steps;             ///< integration steps that hit a stop

    std::size_t frame_count() const { return time.size(); }
    std::size_t marker_count() const { return marker_x.size(); }
};

/// Delivered motor torque: gain*voltage minus a velocity back-term, clamped
/// to the design torque limit.
double motor_torque(double voltage, double joint_velocity, const RobotDesign& design);

/// Pose/rates of one link for the standalone force view.
struct LinkMotion {
    double heading = 0.0;            ///< rad
    std::array<double, 2> velocity{0.0, 0.0};       ///< m/s at link center
    double angular_velocity = 0.0;   ///< rad/s
    std::array<double, 2> acceleration{0.0, 0.0};   ///< m/s^2 at link center
    double angular_acceleration = 0.0;              ///< rad/s^2
};

struct Wrench {
    std::array<double, 2> force{0.0, 0.0};  ///< N
    double torque = 0.0;                    ///< N*m about the link center
};

/// Resultant fluid wrench on one link of length `link_length`: quadratic
/// resistive drag (normal and tangential, Gauss quadrature along the link)
/// plus the added-mass reaction to normal acceleration.
Wrench hydro_wrench(const LinkMotion& motion, double link_length, const RobotDesign& design);

/// One fixed step of the chain under constant per-joint voltages.
struct StepResult {
    SimState state;
    std::vector<double> joint_torques;   ///< delivered motor torque, actuated joints
    double hydro_dissipation = 0.0;      ///< J over the step, >= 0
    double passive_dissipation = 0.0;    ///< J over the step, >= 0
    bool joint_limit_hit = false;
};
StepResult step(const SimState& state, const std::vector<double>& voltages,
                const RobotDesign& design, double dt, const SimConfig& config = {});

/// Runs the CPG-driven swimmer. The seed perturbs only the initial CPG state
/// (the limit cycle phase); identical inputs give bit-identical trajectories.
Trajectory simulate(const RobotDesign& design, const CpgParams& cpg_params, double duration,
                    double dt, std::uint64_t seed, const SimConfig& config = {});

/// Runs the swimmer from an explicit voltage signal (disruption studies).
Trajectory simulate_signal(const RobotDesign& design, const VoltageSignal& signal,
                           double duration, double dt, const SimConfig& config = {});

/// Mechanical bookkeeping of a recorded run. `residual` is the absolute gap
/// in actuator work = delta KE + delta spring energy + hydro + passive
/// dissipation + wake energy; `residual_ratio` divides by actuator work.
struct EnergyAudit {
    double actuator_work = 0.0;
    double delta_kinetic = 0.0;
    double delta_spring = 0.0;
    double hydro_dissipation = 0.0;
    double passive_dissipation = 0.0;
    double wake_energy = 0.0;
    double residual = 0.0;
    double residual_ratio = 0.0;
};
EnergyAudit energy_audit(const Trajectory& traj, const RobotDesign& design);

/// Total linear momentum of body plus entrained (added-mass) fluid.
std::array<double, 2> total_momentum(const SimState& state, const RobotDesign& design);
/// Net resistive-drag force on the whole chain in the lab frame.
std::array<double, 2> net_drag_force(const SimState& state, const RobotDesign& design);
/// Kinetic energy of body plus added mass for the current state.
double chain_kinetic_energy(const SimState& state, const RobotDesign& design);

/// Marker positions for a state, in trajectory marker order.
void chain_markers(const SimState& state, const RobotDesign& design,
                   std::vector<double>& xs, std::vector<double>& ys);

/// Writes the trajectory CSV (schema microswim.trajectory.v1).
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);

}  // namespace microswim
