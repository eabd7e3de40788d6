#pragma once

#include <complex>
#include <span>
#include <vector>

namespace microswim {

/// Amplitude/phase of one spectral line, cosine convention:
/// y(t) ~ amplitude * cos(2*pi*frequency*t + phase).
struct SpectralLine {
    double frequency = 0.0;  ///< Hz
    double amplitude = 0.0;
    double phase = 0.0;      ///< radians in [-pi, pi]
};

/// In-place iterative radix-2 FFT. Size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& a, bool inverse);

/// Frequency of the dominant spectral peak (Hann window, zero-padded FFT,
/// then local refinement of the windowed projection magnitude).
/// Throws AperiodicSignal when no peak rises above the noise floor.
double dominant_frequency(std::span<const double> series, double sample_rate);

/// Hann-windowed projection of the series onto the given frequency.
SpectralLine fundamental_component(std::span<const double> series, double sample_rate,
                                   double frequency);

/// Analytic signal via FFT-based Hilbert transform (zero-padded to a power
/// of two; the returned vector matches the input length, edges included).
std::vector<std::complex<double>> analytic_signal(std::span<const double> series);

/// Wrap an angle to [-pi, pi].
double wrap_angle(double radians);

}  // namespace microswim
