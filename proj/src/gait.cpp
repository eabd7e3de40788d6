#include "microswim/gait.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "microswim/csv.hpp"
#include "microswim/errors.hpp"
#include "microswim/fourier.hpp"

namespace microswim {

namespace {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

Vec2 centroid_at(const Trajectory& traj, std::size_t frame) {
    Vec2 c;
    const std::size_t m = traj.marker_count();
    for (std::size_t i = 0; i < m; ++i) {
        c.x += traj.marker_x[i][frame];
        c.y += traj.marker_y[i][frame];
    }
    c.x /= static_cast<double>(m);
    c.y /= static_cast<double>(m);
    return c;
}

/// Unit lateral axis for a window: perpendicular to the mean displacement,
/// or to the mean body axis when the body barely moved.
Vec2 lateral_axis(const Trajectory& traj, const SteadyWindow& w, bool* flagged) {
    const Vec2 a = centroid_at(traj, w.begin_frame);
    const Vec2 b = centroid_at(traj, w.end_frame);
    double dx = b.x - a.x, dy = b.y - a.y;
    const double disp = std::hypot(dx, dy);
    if (disp < 1e-9) {
        // mean head-to-tail axis over the window
        dx = 0.0;
        dy = 0.0;
        for (std::size_t k = w.begin_frame; k <= w.end_frame; ++k) {
            dx += traj.marker_x.front()[k] - traj.marker_x.back()[k];
            dy += traj.marker_y.front()[k] - traj.marker_y.back()[k];
        }
        const double norm = std::hypot(dx, dy);
        if (norm < 1e-12) throw NumericalError("lateral axis undefined: degenerate geometry");
        dx /= norm;
        dy /= norm;
        if (flagged) *flagged = true;
    } else {
        dx /= disp;
        dy /= disp;
    }
    return {-dy, dx};
}

double mean_abs_lateral_velocity(const Trajectory& traj, const SteadyWindow& w,
                                 std::size_t marker_first, std::size_t marker_last,
                                 bool* flagged) {
    if (w.end_frame <= w.begin_frame) throw DataError("window too short");
    const Vec2 lat = lateral_axis(traj, w, flagged);
    const double duration = traj.time[w.end_frame] - traj.time[w.begin_frame];
    double acc = 0.0;
    const std::size_t n_markers = marker_last - marker_first + 1;
    for (std::size_t m = marker_first; m <= marker_last; ++m) {
        double tv = 0.0;  // total variation of the lateral coordinate
        double prev = lat.x * traj.marker_x[m][w.begin_frame] +
                      lat.y * traj.marker_y[m][w.begin_frame];
        for (std::size_t k = w.begin_frame + 1; k <= w.end_frame; ++k) {
            const double cur = lat.x * traj.marker_x[m][k] + lat.y * traj.marker_y[m][k];
            tv += std::abs(cur - prev);
            prev = cur;
        }
        acc += tv / duration;
    }
    return acc / static_cast<double>(n_markers);
}

}  // namespace

double window_speed(const Trajectory& traj, std::size_t frame_begin, std::size_t frame_end) {
    const Vec2 a = centroid_at(traj, frame_begin);
    const Vec2 b = centroid_at(traj, frame_end);
    const double duration = traj.time[frame_end] - traj.time[frame_begin];
    return std::hypot(b.x - a.x, b.y - a.y) / duration;
}

SteadyWindow steady_window(const Trajectory& traj, double window_seconds) {
    if (traj.frame_count() < 4) throw DataError("steady_window: trajectory too short");
    const double total = traj.time.back() - traj.time.front();
    if (total < 3.0 * window_seconds)
        throw DataError("steady_window: trajectory must span >= 3 windows (" +
                        std::to_string(total) + " s < 3 x " + std::to_string(window_seconds) +
                        " s)");
    const double dt = traj.sample_dt;
    const std::size_t w_frames = static_cast<std::size_t>(std::llround(window_seconds / dt));
    const std::size_t hop = std::max<std::size_t>(1, w_frames / 4);
    const std::size_t last = traj.frame_count() - 1;

    auto make = [&](std::size_t begin, bool fallback) {
        SteadyWindow w;
        w.begin_frame = begin;
        w.end_frame = begin + w_frames;
        w.t_begin = traj.time[w.begin_frame];
        w.t_end = traj.time[w.end_frame];
        w.fallback = fallback;
        return w;
    };

    for (std::size_t end = last; end >= w_frames; end -= std::min(hop, end - w_frames + 1)) {
        const std::size_t begin = end - w_frames;
        const std::size_t mid = begin + w_frames / 2;
        const double s1 = window_speed(traj, begin, mid);
        const double s2 = window_speed(traj, mid, end);
        const double ref = std::max({s1, s2, 1e-12});
        if (std::abs(s1 - s2) < 0.02 * ref || (s1 == 0.0 && s2 == 0.0)) {
            SteadyWindow w = make(begin, false);
            w.end_frame = end;
            w.t_end = traj.time[end];
            return w;
        }
        if (end - w_frames < hop) break;
    }
    SteadyWindow w = make(last - w_frames, true);
    return w;
}

JointRhythm joint_amplitudes_phases(const Trajectory& traj, const SteadyWindow& w) {
    const std::size_t n = traj.joint_torques.size() > 0 ? traj.joint_torques.size()
                                                        : traj.joint_angles.size();
    if (n == 0) throw DataError("joint_amplitudes_phases: no joint channels");
    const double rate = 1.0 / traj.sample_dt;

    auto slice = [&](const std::vector<double>& ch) {
        return std::vector<double>(ch.begin() + static_cast<long>(w.begin_frame),
                                   ch.begin() + static_cast<long>(w.end_frame) + 1);
    };

    const std::vector<double> posterior = slice(traj.joint_angles[n - 1]);
    double f;
    try {
        f = dominant_frequency(posterior, rate);
    } catch (const AperiodicSignal&) {
        throw AperiodicSignal("joint_amplitudes_phases: aperiodic joint signal");
    }
    const double duration = w.t_end - w.t_begin;
    if (f * duration < 4.5)
        throw AperiodicSignal("joint_amplitudes_phases: window covers fewer than ~5 cycles");

    JointRhythm r;
    r.frequency = f;
    std::vector<double> phase_abs(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto seg = slice(traj.joint_angles[j]);
        const SpectralLine line = fundamental_component(seg, rate, f);
        r.amplitudes.push_back(line.amplitude);
        phase_abs[j] = line.phase;
    }
    for (std::size_t j = 0; j + 1 < n; ++j)
        r.phases.push_back(wrap_angle(phase_abs[j + 1] - phase_abs[j]));
    return r;
}

double mean_bcf_undulatory_velocity(const Trajectory& traj, const SteadyWindow& w,
                                    bool* lateral_axis_flagged) {
    if (traj.marker_count() < 2)
        throw DataError("mean_bcf_undulatory_velocity: needs >= 2 markers");
    return mean_abs_lateral_velocity(traj, w, 0, traj.marker_count() - 1,
                                     lateral_axis_flagged);
}

double caudal_tip_velocity(const Trajectory& traj, const SteadyWindow& w,
                           bool* lateral_axis_flagged) {
    if (traj.marker_count() < 1) throw DataError("caudal_tip_velocity: no markers");
    const std::size_t tip = traj.marker_count() - 1;
    return mean_abs_lateral_velocity(traj, w, tip, tip, lateral_axis_flagged);
}

WaveDecomposition wave_index(const Trajectory& traj, const SteadyWindow& w) {
    const std::size_t M = traj.marker_count();
    if (M < 4) throw DataError("wave_index: needs >= 4 markers");
    const std::size_t frames = w.end_frame - w.begin_frame + 1;
    if (frames < 16) throw DataError("wave_index: window too short");

    const Vec2 lat = lateral_axis(traj, w, nullptr);

    // lateral displacement field, per-marker detrended
    std::vector<std::vector<double>> y(M, std::vector<double>(frames));
    double max_amp = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
        double mean = 0.0;
        for (std::size_t k = 0; k < frames; ++k) {
            y[m][k] = lat.x * traj.marker_x[m][w.begin_frame + k] +
                      lat.y * traj.marker_y[m][w.begin_frame + k];
            mean += y[m][k];
        }
        mean /= static_cast<double>(frames);
        for (auto& v : y[m]) v -= mean;
        for (double v : y[m]) max_amp = std::max(max_amp, std::abs(v));
    }
    if (max_amp < 1e-9) throw AperiodicSignal("wave_index: no oscillation in window");

    // analytic signals; drop 10% at each edge against Hilbert edge effects
    const std::size_t trim = frames / 10;
    const std::size_t t0 = trim, t1 = frames - trim;
    std::vector<std::vector<std::complex<double>>> a(M);
    for (std::size_t m = 0; m < M; ++m) a[m] = analytic_signal(y[m]);

    // Hermitian correlation matrix R = sum_t a(t) a(t)^H
    std::vector<std::complex<double>> R(M * M, {0.0, 0.0});
    for (std::size_t t = t0; t < t1; ++t)
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t j = 0; j < M; ++j)
                R[i * M + j] += a[i][t] * std::conj(a[j][t]);

    // dominant eigenvector by power iteration
    std::vector<std::complex<double>> phi(M, {1.0, 0.0}), next(M);
    for (int it = 0; it < 200; ++it) {
        for (std::size_t i = 0; i < M; ++i) {
            std::complex<double> s{0.0, 0.0};
            for (std::size_t j = 0; j < M; ++j) s += R[i * M + j] * phi[j];
            next[i] = s;
        }
        double norm = 0.0;
        for (const auto& v : next) norm += std::norm(v);
        norm = std::sqrt(norm);
        if (norm == 0.0) throw NumericalError("wave_index: zero correlation matrix");
        for (std::size_t i = 0; i < M; ++i) phi[i] = next[i] / norm;
    }

    // split into real constituents; singular values of [Re phi, Im phi]
    double g11 = 0.0, g22 = 0.0, g12 = 0.0;
    for (const auto& v : phi) {
        g11 += v.real() * v.real();
        g22 += v.imag() * v.imag();
        g12 += v.real() * v.imag();
    }
    const double tr = g11 + g22;
    const double disc = std::sqrt((g11 - g22) * (g11 - g22) + 4.0 * g12 * g12);
    const double s1 = std::sqrt(std::max(0.0, 0.5 * (tr + disc)));
    const double s2 = std::sqrt(std::max(0.0, 0.5 * (tr - disc)));
    WaveDecomposition out;
    out.index = s1 > 0.0 ? std::clamp(s2 / s1, 0.0, 1.0) : 0.0;

    // nodal points: interior local minima of per-marker RMS lateral amplitude
    std::vector<double> amp(M, 0.0);
    for (std::size_t m = 0; m < M; ++m) {
        double acc = 0.0;
        for (std::size_t t = t0; t < t1; ++t) acc += y[m][t] * y[m][t];
        amp[m] = std::sqrt(acc / static_cast<double>(t1 - t0));
    }
    std::vector<double> arc(M, 0.0);
    for (std::size_t m = 1; m < M; ++m) {
        double mean_gap = 0.0;
        for (std::size_t t = t0; t < t1; ++t)
            mean_gap += std::hypot(traj.marker_x[m][w.begin_frame + t] -
                                       traj.marker_x[m - 1][w.begin_frame + t],
                                   traj.marker_y[m][w.begin_frame + t] -
                                       traj.marker_y[m - 1][w.begin_frame + t]);
        arc[m] = arc[m - 1] + mean_gap / static_cast<double>(t1 - t0);
    }
    for (std::size_t m = 1; m + 1 < M; ++m)
        if (amp[m] < amp[m - 1] && amp[m] < amp[m + 1]) out.node_positions.push_back(arc[m]);
    return out;
}

GaitSummary compute_gait_metrics(const Trajectory& traj, const RobotDesign& design,
                                 double window_seconds) {
    GaitSummary s;
    s.window = steady_window(traj, window_seconds);
    if (s.window.fallback) s.flags.push_back("steady_window_fallback");

    s.metrics.speed = window_speed(traj, s.window.begin_frame, s.window.end_frame);

    const JointRhythm rhythm = joint_amplitudes_phases(traj, s.window);
    s.metrics.frequency = rhythm.frequency;
    s.metrics.joint_amplitudes = rhythm.amplitudes;
    s.metrics.intersegmental_phases = rhythm.phases;

    bool flagged = false;
    s.metrics.bcf_undulatory_velocity = mean_bcf_undulatory_velocity(traj, s.window, &flagged);
    s.metrics.caudal_tip_velocity = caudal_tip_velocity(traj, s.window, nullptr);
    if (flagged) s.flags.push_back("lateral_axis_from_body_orientation");
    if (!design.has_caudal_fin) s.flags.push_back("tip_velocity_from_last_body_marker");

    s.metrics.wave_index = wave_index(traj, s.window).index;
    return s;
}

void write_metrics_csv(const GaitMetrics& m, const std::filesystem::path& path) {
    std::vector<std::string> cols{"speed", "frequency"};
    for (std::size_t j = 0; j < m.joint_amplitudes.size(); ++j)
        cols.push_back("m" + std::to_string(j + 1));
    for (std::size_t j = 0; j < m.intersegmental_phases.size(); ++j)
        cols.push_back("ip" + std::to_string(j + 1));
    cols.push_back("caudal_tip_velocity");
    cols.push_back("bcf_undulatory_velocity");
    cols.push_back("wave_index");

    CsvWriter w(path, "microswim.metrics.v1", cols);
    std::vector<double> row{m.speed, m.frequency};
    row.insert(row.end(), m.joint_amplitudes.begin(), m.joint_amplitudes.end());
    row.insert(row.end(), m.intersegmental_phases.begin(), m.intersegmental_phases.end());
    row.push_back(m.caudal_tip_velocity);
    row.push_back(m.bcf_undulatory_velocity);
    row.push_back(m.wave_index);
    w.row(row);
}

}  // namespace microswim
