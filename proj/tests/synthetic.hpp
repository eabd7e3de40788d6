#pragma once

// Synthetic trajectory builders shared by the analysis tests. These bypass
// the simulator so the metrics code is exercised against closed-form fields.

#include <cmath>
#include <functional>
#include <vector>

#include "microswim/sim.hpp"

namespace microswim::testing {

/// Markers ride at body stations x_i (spacing `dx`), advected forward at
/// `speed`, with lateral displacement y = field(x_i, t).
inline Trajectory lateral_field_trajectory(std::size_t n_markers, double dx, double duration,
                                           double dt, double speed,
                                           const std::function<double(double, double)>& field) {
    Trajectory t;
    t.sample_dt = dt;
    const std::size_t frames = static_cast<std::size_t>(duration / dt) + 1;
    t.marker_x.assign(n_markers, {});
    t.marker_y.assign(n_markers, {});
    for (std::size_t k = 0; k < frames; ++k) {
        const double tk = static_cast<double>(k) * dt;
        t.time.push_back(tk);
        for (std::size_t m = 0; m < n_markers; ++m) {
            const double x = static_cast<double>(m) * dx;
            t.marker_x[m].push_back(x + speed * tk);
            t.marker_y[m].push_back(field(x, tk));
        }
    }
    return t;
}

/// Joint-channel trajectory: angles[j](t), optional torques. Markers are two
/// dummy points so window selection has a centroid to track.
inline Trajectory joint_signal_trajectory(
    double duration, double dt,
    const std::vector<std::function<double(double)>>& angles,
    const std::vector<std::function<double(double)>>& torques = {}) {
    Trajectory t;
    t.sample_dt = dt;
    const std::size_t frames = static_cast<std::size_t>(duration / dt) + 1;
    t.joint_angles.assign(angles.size(), {});
    t.joint_torques.assign(torques.size(), {});
    t.marker_x.assign(2, {});
    t.marker_y.assign(2, {});
    for (std::size_t k = 0; k < frames; ++k) {
        const double tk = static_cast<double>(k) * dt;
        t.time.push_back(tk);
        for (std::size_t j = 0; j < angles.size(); ++j)
            t.joint_angles[j].push_back(angles[j](tk));
        for (std::size_t j = 0; j < torques.size(); ++j)
            t.joint_torques[j].push_back(torques[j](tk));
        t.marker_x[0].push_back(0.0);
        t.marker_y[0].push_back(0.0);
        t.marker_x[1].push_back(0.1);
        t.marker_y[1].push_back(0.0);
    }
    return t;
}

/// Interpolated zero-crossing frequency estimate: the independent oracle the
/// spectral path is checked against.
inline double zero_crossing_frequency(const std::vector<double>& y, double sample_rate) {
    std::vector<double> crossings;
    for (std::size_t k = 1; k < y.size(); ++k) {
        if (y[k - 1] < 0.0 && y[k] >= 0.0) {
            const double frac = -y[k - 1] / (y[k] - y[k - 1]);
            crossings.push_back((static_cast<double>(k - 1) + frac) / sample_rate);
        }
    }
    if (crossings.size() < 2) return 0.0;
    return static_cast<double>(crossings.size() - 1) / (crossings.back() - crossings.front());
}

}  // namespace microswim::testing
