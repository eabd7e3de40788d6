#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "microswim/gait.hpp"
#include "microswim/sim.hpp"

namespace microswim {

enum class ActuatorClass { Motor, Brake, VirtualSpring, VirtualMass };
std::string to_string(ActuatorClass c);

/// Cycle-resolved torque-vs-angle loop of one actuator.
struct WorkLoop {
    std::size_t joint = 0;
    std::vector<double> angle;    ///< rad, whole cycles, starts at an angle maximum
    std::vector<double> torque;   ///< N*m, aligned with angle
    double net_work = 0.0;        ///< J per cycle (loop line integral / cycles)
    double normalized_area = 0.0; ///< net_work / (pi * torque_amp * angle_amp)
    double inclination = 0.0;     ///< N*m/rad, least-squares torque-on-angle slope
    double frequency = 0.0;       ///< Hz of the gait fundamental
    std::size_t cycles = 0;
    bool trimmed = false;         ///< window was cut to whole cycles
    ActuatorClass classification = ActuatorClass::Motor;
};

/// Extracts the loop of `joint` over the window (trimmed to whole cycles of
/// the gait fundamental; needs >= 3). Throws when torques are missing.
WorkLoop work_loop(const Trajectory& traj, std::size_t joint, const SteadyWindow& window);

/// Area/inclination rule: |normalized area| >= threshold separates
/// motor (positive work) and brake (negative) from the low-work regimes,
/// which split by inclination sign into virtual spring (restoring, negative)
/// and virtual mass (anti-restoring, positive).
ActuatorClass classify_actuator(const WorkLoop& loop, double area_threshold = 0.3);

/// Time-averaged net mechanical output of all actuators over the window.
double mean_total_power(const Trajectory& traj, const SteadyWindow& window);

/// Net cost of transport (J/m) and its mass-normalized variant (J/(m*kg)).
struct CostOfTransport {
    double cot_net = 0.0;
    double cot_w_net = 0.0;
};
CostOfTransport cost_of_transport(double power, double speed, double mass);

void write_workloops_csv(const std::vector<WorkLoop>& loops, const std::vector<double>& frequencies,
                         const std::filesystem::path& path);

}  // namespace microswim
