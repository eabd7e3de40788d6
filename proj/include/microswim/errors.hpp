#pragma once

#include <stdexcept>
#include <string>

namespace microswim {

/// Bad user input: malformed config/CSV, out-of-domain argument, missing file.
/// Maps to process exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: non-finite state, divergence, unsolvable bracket.
/// Maps to process exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Integration produced a non-finite state; carries the offending step index.
class IntegrationDivergence : public NumericalError {
public:
    IntegrationDivergence(const std::string& what, long step)
        : NumericalError(what + " (step " + std::to_string(step) + ")"), step_index(step) {}
    long step_index;
};

/// Requested frequency lies outside the band reachable by tau adjustment.
class UnreachableFrequency : public NumericalError {
public:
    UnreachableFrequency(double target_hz, double lo_hz, double hi_hz)
        : NumericalError("target frequency " + std::to_string(target_hz) +
                         " Hz outside achievable band [" + std::to_string(lo_hz) + ", " +
                         std::to_string(hi_hz) + "] Hz"),
          target(target_hz), band_lo(lo_hz), band_hi(hi_hz) {}
    double target, band_lo, band_hi;
};

/// Signal has no usable spectral peak (constant, noise-only, or chaotic).
class AperiodicSignal : public NumericalError {
public:
    explicit AperiodicSignal(const std::string& what) : NumericalError(what) {}
};

}  // namespace microswim
