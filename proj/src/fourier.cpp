#include "microswim/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "microswim/errors.hpp"

namespace microswim {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

double hann(std::size_t k, std::size_t n) {
    return 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(k) / static_cast<double>(n - 1));
}

/// |Hann-windowed projection| of the detrended series at frequency f.
double projection_power(std::span<const double> y, double mean, double dt, double f) {
    std::complex<double> acc{0.0, 0.0};
    const double w0 = 2.0 * kPi * f;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double t = static_cast<double>(k) * dt;
        acc += hann(k, y.size()) * (y[k] - mean) * std::polar(1.0, -w0 * t);
    }
    return std::abs(acc);
}

}  // namespace

void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n < 2) return;
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const std::complex<double> wl = std::polar(1.0, ang);
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w{1.0, 0.0};
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse) {
        for (auto& x : a) x /= static_cast<double>(n);
    }
}

double dominant_frequency(std::span<const double> series, double sample_rate) {
    const std::size_t n = series.size();
    if (n < 16) throw AperiodicSignal("series too short for spectral analysis");

    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(n);
    double peak_abs = 0.0;
    for (double v : series) peak_abs = std::max(peak_abs, std::abs(v - mean));
    if (peak_abs < 1e-12) throw AperiodicSignal("signal is constant");

    // Hann-windowed, zero-padded magnitude spectrum.
    const std::size_t nfft = next_pow2(n) * 2;
    std::vector<std::complex<double>> buf(nfft, {0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) buf[k] = hann(k, n) * (series[k] - mean);
    fft_radix2(buf, false);

    const std::size_t half = nfft / 2;
    std::vector<double> mag(half);
    for (std::size_t k = 0; k < half; ++k) mag[k] = std::abs(buf[k]);

    // Skip bins whose period exceeds half the record; a peak there is not resolvable.
    const double bin_hz = sample_rate / static_cast<double>(nfft);
    std::size_t k_min = static_cast<std::size_t>(std::ceil(2.0 * sample_rate / (static_cast<double>(n) * bin_hz)));
    k_min = std::max<std::size_t>(k_min, 2);
    if (k_min >= half) throw AperiodicSignal("series too short for spectral analysis");

    std::size_t k_peak = k_min;
    for (std::size_t k = k_min; k < half; ++k)
        if (mag[k] > mag[k_peak]) k_peak = k;

    std::vector<double> sorted(mag.begin() + static_cast<long>(k_min), mag.end());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2), sorted.end());
    const double noise_floor = sorted[sorted.size() / 2];
    if (!(mag[k_peak] > 10.0 * noise_floor) || mag[k_peak] <= 0.0)
        throw AperiodicSignal("no spectral peak above noise floor");

    // Golden-section refinement of the projection magnitude around the peak bin.
    const double dt = 1.0 / sample_rate;
    double lo = (static_cast<double>(k_peak) - 1.0) * bin_hz;
    double hi = (static_cast<double>(k_peak) + 1.0) * bin_hz;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
    double fa = projection_power(series, mean, dt, a);
    double fb = projection_power(series, mean, dt, b);
    for (int it = 0; it < 60 && (hi - lo) > 1e-9 * std::max(1.0, hi); ++it) {
        if (fa < fb) {
            lo = a; a = b; fa = fb;
            b = lo + gr * (hi - lo);
            fb = projection_power(series, mean, dt, b);
        } else {
            hi = b; b = a; fb = fa;
            a = hi - gr * (hi - lo);
            fa = projection_power(series, mean, dt, a);
        }
    }
    return 0.5 * (lo + hi);
}

SpectralLine fundamental_component(std::span<const double> series, double sample_rate,
                                   double frequency) {
    const std::size_t n = series.size();
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(std::max<std::size_t>(n, 1));

    std::complex<double> acc{0.0, 0.0};
    double wsum = 0.0;
    const double w0 = 2.0 * kPi * frequency;
    const double dt = 1.0 / sample_rate;
    for (std::size_t k = 0; k < n; ++k) {
        const double w = hann(k, n);
        acc += w * (series[k] - mean) * std::polar(1.0, -w0 * static_cast<double>(k) * dt);
        wsum += w;
    }
    SpectralLine line;
    line.frequency = frequency;
    line.amplitude = 2.0 * std::abs(acc) / wsum;
    line.phase = std::arg(acc);
    return line;
}

std::vector<std::complex<double>> analytic_signal(std::span<const double> series) {
    const std::size_t n = series.size();
    const std::size_t nfft = next_pow2(n);
    std::vector<std::complex<double>> buf(nfft, {0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) buf[k] = series[k];
    fft_radix2(buf, false);
    for (std::size_t k = 1; k < nfft / 2; ++k) buf[k] *= 2.0;
    for (std::size_t k = nfft / 2 + 1; k < nfft; ++k) buf[k] = {0.0, 0.0};
    fft_radix2(buf, true);
    buf.resize(n);
    return buf;
}

double wrap_angle(double radians) {
    double w = std::remainder(radians, 2.0 * kPi);
    if (w <= -kPi) w += 2.0 * kPi;
    if (w > kPi) w -= 2.0 * kPi;
    return w;
}

}  // namespace microswim
