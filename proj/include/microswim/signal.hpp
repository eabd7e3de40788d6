#pragma once

#include <cstddef>
#include <vector>

#include "microswim/cpg.hpp"

namespace microswim {

/// Per-joint voltage command as a function of time.
///
/// Backed by a densely sampled table with linear interpolation, which makes
/// the disruption transforms (channel gain, channel delay, time rescale)
/// exact signal operations: value(ch, t) = gain[ch] * table[ch](t * time_factor
/// - delay[ch]). Queries outside the table clamp to its edges, so generate
/// with margin when transforms are planned.
class VoltageSignal {
public:
    VoltageSignal(std::vector<std::vector<double>> channels, double sample_rate);

    /// Samples a network rollout into a signal table. `scale` converts module
    /// output units to volts; the simulator applies its own +-v_max clamp.
    static VoltageSignal from_cpg(const CpgParams& params, double duration, double dt,
                                  const CpgState& initial, double scale,
                                  double table_rate = 2000.0);

    std::size_t channel_count() const { return channels_.size(); }
    double duration() const;
    double value(std::size_t channel, double t) const;

    void scale_channel(std::size_t channel, double factor);
    /// Delays every channel with index >= first_channel by `seconds`.
    void delay_channels_from(std::size_t first_channel, double seconds);
    /// Plays the signal faster (factor > 1) or slower (factor < 1).
    void rescale_time(double factor);

private:
    std::vector<std::vector<double>> channels_;
    double sample_rate_;
    std::vector<double> gain_;
    std::vector<double> delay_;
    double time_factor_ = 1.0;
};

}  // namespace microswim
