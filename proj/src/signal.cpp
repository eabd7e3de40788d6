#include "microswim/signal.hpp"

#include <cmath>

#include "microswim/errors.hpp"

namespace microswim {

VoltageSignal::VoltageSignal(std::vector<std::vector<double>> channels, double sample_rate)
    : channels_(std::move(channels)), sample_rate_(sample_rate) {
    if (channels_.empty()) throw DataError("VoltageSignal: no channels");
    if (!(sample_rate_ > 0.0)) throw DataError("VoltageSignal: sample_rate must be > 0");
    for (const auto& ch : channels_)
        if (ch.size() != channels_.front().size() || ch.size() < 2)
            throw DataError("VoltageSignal: channels must share length >= 2");
    gain_.assign(channels_.size(), 1.0);
    delay_.assign(channels_.size(), 0.0);
}

VoltageSignal VoltageSignal::from_cpg(const CpgParams& params, double duration, double dt,
                                      const CpgState& initial, double scale,
                                      double table_rate) {
    SignalTrace trace = cpg_run(params, duration, dt, initial, table_rate);
    for (auto& ch : trace.outputs)
        for (auto& v : ch) v *= scale;
    return VoltageSignal(std::move(trace.outputs), trace.sample_rate);
}

double VoltageSignal::duration() const {
    return static_cast<double>(channels_.front().size() - 1) / sample_rate_;
}

double VoltageSignal::value(std::size_t channel, double t) const {
    const auto& ch = channels_[channel];
    double tq = t * time_factor_ - delay_[channel];
    if (tq < 0.0) tq = 0.0;
    double pos = tq * sample_rate_;
    const double last = static_cast<double>(ch.size() - 1);
    if (pos >= last) pos = last;
    const std::size_t k = static_cast<std::size_t>(pos);
    const std::size_t k1 = std::min(k + 1, ch.size() - 1);
    const double frac = pos - static_cast<double>(k);
    return gain_[channel] * ((1.0 - frac) * ch[k] + frac * ch[k1]);
}

void VoltageSignal::scale_channel(std::size_t channel, double factor) {
    if (channel >= channels_.size()) throw DataError("VoltageSignal: channel out of range");
    gain_[channel] *= factor;
}

void VoltageSignal::delay_channels_from(std::size_t first_channel, double seconds) {
    if (first_channel >= channels_.size())
        throw DataError("VoltageSignal: channel out of range");
    for (std::size_t c = first_channel; c < channels_.size(); ++c) delay_[c] += seconds;
}

void VoltageSignal::rescale_time(double factor) {
    if (!(factor > 0.0)) throw DataError("VoltageSignal: time factor must be > 0");
    time_factor_ *= factor;
}

}  // namespace microswim
