#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "microswim/robot.hpp"
#include "microswim/sim.hpp"

namespace microswim {

/// Frame range [begin, end] of a trajectory selected as steady swimming.
struct SteadyWindow {
    std::size_t begin_frame = 0;
    std::size_t end_frame = 0;   ///< inclusive
    double t_begin = 0.0;
    double t_end = 0.0;
    bool fallback = false;       ///< no steady interval found; final window used
};

/// Latest window of the given length whose consecutive half-window mean
/// speeds agree within 2%. Falls back to the final window (flagged) when the
/// run never settles. Requires the trajectory to span >= 3 windows.
SteadyWindow steady_window(const Trajectory& traj, double window_seconds);

/// Fundamental rhythm of the actuated joints over a window.
struct JointRhythm {
    double frequency = 0.0;                    ///< Hz, from the most posterior joint
    std::vector<double> amplitudes;            ///< rad, fundamental amplitude per joint
    std::vector<double> phases;                ///< rad, adjacent-joint lag, wrapped
};
JointRhythm joint_amplitudes_phases(const Trajectory& traj, const SteadyWindow& window);

/// Time-average over the window of the marker-average absolute lateral
/// velocity, all markers equally weighted. Lateral = perpendicular to the
/// mean displacement direction; a zero-displacement window falls back to the
/// mean body axis (flag set when provided).
double mean_bcf_undulatory_velocity(const Trajectory& traj, const SteadyWindow& window,
                                    bool* lateral_axis_flagged = nullptr);

/// Same average for the most posterior marker only (the caudal-fin tip when
/// the design has one).
double caudal_tip_velocity(const Trajectory& traj, const SteadyWindow& window,
                           bool* lateral_axis_flagged = nullptr);

/// Traveling/standing decomposition of the lateral displacement field.
struct WaveDecomposition {
    double index = 0.0;                    ///< 0 = pure standing, 1 = pure traveling
    std::vector<double> node_positions;    ///< arc length (m) of lateral-amplitude minima
};

/// Complex orthogonal decomposition of the marker lateral displacements:
/// the dominant complex mode is split into its two real constituents and the
/// index is the ratio of their singular values. Requires >= 4 markers.
WaveDecomposition wave_index(const Trajectory& traj, const SteadyWindow& window);

/// Emergent gait quantities of one run.
struct GaitMetrics {
    double speed = 0.0;                         ///< m/s, centroid displacement / window
    double frequency = 0.0;                     ///< Hz
    std::vector<double> joint_amplitudes;       ///< rad, actuated joints
    std::vector<double> intersegmental_phases;  ///< rad, length n-1
    double caudal_tip_velocity = 0.0;           ///< m/s
    double bcf_undulatory_velocity = 0.0;       ///< m/s
    double wave_index = 0.0;
};

/// All metrics over the steady window, plus any fallback/convention flags.
struct GaitSummary {
    GaitMetrics metrics;
    SteadyWindow window;
    std::vector<std::string> flags;
};
GaitSummary compute_gait_metrics(const Trajectory& traj, const RobotDesign& design,
                                 double window_seconds = 2.0);

/// Mean speed of the marker centroid over a window (magnitude of net
/// displacement over duration).
double window_speed(const Trajectory& traj, std::size_t frame_begin, std::size_t frame_end);

void write_metrics_csv(const GaitMetrics& m, const std::filesystem::path& path);

}  // namespace microswim
