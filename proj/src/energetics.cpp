#include "microswim/energetics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "microswim/csv.hpp"
#include "microswim/errors.hpp"
#include "microswim/fourier.hpp"

namespace microswim {

std::string to_string(ActuatorClass c) {
    switch (c) {
        case ActuatorClass::Motor: return "motor";
        case ActuatorClass::Brake: return "brake";
        case ActuatorClass::VirtualSpring: return "virtual_spring";
        case ActuatorClass::VirtualMass: return "virtual_mass";
    }
    return "?";
}

WorkLoop work_loop(const Trajectory& traj, std::size_t joint, const SteadyWindow& w) {
    if (traj.joint_torques.empty())
        throw DataError("work_loop: trajectory has no torque channel");
    if (joint >= traj.joint_torques.size())
        throw DataError("work_loop: joint index out of range");

    const double rate = 1.0 / traj.sample_dt;
    const std::size_t n_act = traj.joint_torques.size();

    auto slice = [&](const std::vector<double>& ch, std::size_t b, std::size_t e) {
        return std::vector<double>(ch.begin() + static_cast<long>(b),
                                   ch.begin() + static_cast<long>(e) + 1);
    };

    // gait fundamental from the most posterior actuated joint
    const auto posterior = slice(traj.joint_angles[n_act - 1], w.begin_frame, w.end_frame);
    const double f = dominant_frequency(posterior, rate);
    const double duration = w.t_end - w.t_begin;
    const double cycles_exact = f * duration;
    if (cycles_exact < 3.0)
        throw DataError("work_loop: window spans fewer than 3 cycles of the gait fundamental");

    WorkLoop loop;
    loop.joint = joint;
    loop.frequency = f;
    loop.cycles = static_cast<std::size_t>(std::floor(cycles_exact));
    // keep the latest whole-cycle stretch
    const std::size_t span =
        static_cast<std::size_t>(std::llround(static_cast<double>(loop.cycles) / f * rate));
    const std::size_t begin = w.end_frame - std::min(span, w.end_frame - w.begin_frame);
    loop.trimmed = std::abs(cycles_exact - static_cast<double>(loop.cycles)) > 1e-6;

    std::vector<double> th = slice(traj.joint_angles[joint], begin, w.end_frame);
    std::vector<double> tq = slice(traj.joint_torques[joint], begin, w.end_frame);

    // net work per cycle: loop line integral over the whole-cycle stretch
    double work = 0.0;
    for (std::size_t k = 0; k + 1 < th.size(); ++k)
        work += 0.5 * (tq[k] + tq[k + 1]) * (th[k + 1] - th[k]);
    loop.net_work = work / static_cast<double>(loop.cycles);

    const SpectralLine th_line = fundamental_component(th, rate, f);
    const SpectralLine tq_line = fundamental_component(tq, rate, f);
    const double denom = std::numbers::pi * th_line.amplitude * tq_line.amplitude;
    loop.normalized_area = denom > 0.0 ? loop.net_work / denom : 0.0;

    // least-squares torque-on-angle slope
    double th_mean = 0.0, tq_mean = 0.0;
    for (std::size_t k = 0; k < th.size(); ++k) {
        th_mean += th[k];
        tq_mean += tq[k];
    }
    th_mean /= static_cast<double>(th.size());
    tq_mean /= static_cast<double>(tq.size());
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < th.size(); ++k) {
        num += (th[k] - th_mean) * (tq[k] - tq_mean);
        den += (th[k] - th_mean) * (th[k] - th_mean);
    }
    loop.inclination = den > 0.0 ? num / den : 0.0;

    // phase-align the stored loop to the angle maximum
    const std::size_t peak = static_cast<std::size_t>(
        std::max_element(th.begin(), th.end()) - th.begin());
    loop.angle.reserve(th.size());
    loop.torque.reserve(tq.size());
    for (std::size_t k = 0; k < th.size(); ++k) {
        const std::size_t idx = (peak + k) % th.size();
        loop.angle.push_back(th[idx]);
        loop.torque.push_back(tq[idx]);
    }

    loop.classification = classify_actuator(loop);
    return loop;
}

ActuatorClass classify_actuator(const WorkLoop& loop, double area_threshold) {
    bool degenerate = loop.angle.empty();
    if (!degenerate) {
        const auto [amin, amax] = std::minmax_element(loop.angle.begin(), loop.angle.end());
        const auto [tmin, tmax] = std::minmax_element(loop.torque.begin(), loop.torque.end());
        degenerate = (*amax - *amin) < 1e-12 || (*tmax - *tmin) < 1e-12;
    }
    if (degenerate && loop.normalized_area == 0.0 && loop.inclination == 0.0)
        throw DataError("classify_actuator: zero-amplitude loop is unclassifiable");

    if (std::abs(loop.normalized_area) >= area_threshold)
        return loop.net_work > 0.0 ? ActuatorClass::Motor : ActuatorClass::Brake;
    return loop.inclination < 0.0 ? ActuatorClass::VirtualSpring : ActuatorClass::VirtualMass;
}

double mean_total_power(const Trajectory& traj, const SteadyWindow& w) {
    if (traj.joint_torques.empty())
        throw DataError("mean_total_power: trajectory has no torque channel");
    const double duration = traj.time[w.end_frame] - traj.time[w.begin_frame];
    if (!(duration > 0.0)) throw DataError("mean_total_power: empty window");

    double work = 0.0;
    for (std::size_t j = 0; j < traj.joint_torques.size(); ++j) {
        const auto& tq = traj.joint_torques[j];
        const auto& th = traj.joint_angles[j];
        for (std::size_t k = w.begin_frame; k < w.end_frame; ++k)
            work += 0.5 * (tq[k] + tq[k + 1]) * (th[k + 1] - th[k]);
    }
    return work / duration;
}

CostOfTransport cost_of_transport(double power, double speed, double mass) {
    if (!(speed > 0.0)) throw DataError("cost_of_transport: speed must be > 0");
    if (!(mass > 0.0)) throw DataError("cost_of_transport: mass must be > 0");
    CostOfTransport cot;
    cot.cot_net = power / speed;
    cot.cot_w_net = cot.cot_net / mass;
    return cot;
}

void write_workloops_csv(const std::vector<WorkLoop>& loops,
                         const std::vector<double>& frequencies,
                         const std::filesystem::path& path) {
    if (frequencies.size() != loops.size())
        throw DataError("write_workloops_csv: frequency list must match loops");
    CsvWriter w(path, "microswim.workloops.v1",
                {"frequency", "joint", "net_work", "normalized_area", "inclination", "class"});
    for (std::size_t i = 0; i < loops.size(); ++i) {
        const auto& l = loops[i];
        w.row_raw({format_double(frequencies[i]), std::to_string(l.joint + 1),
                   format_double(l.net_work), format_double(l.normalized_area),
                   format_double(l.inclination), to_string(l.classification)});
    }
}

}  // namespace microswim
