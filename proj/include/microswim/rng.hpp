#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace microswim {

/// Seedable generator family used by every stochastic call site.
///
/// A run owns one root seed; independent substreams are derived from
/// (root seed, label) so that parallel consumers stay reproducible no
/// matter the execution schedule. The engine is std::mt19937_64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Derive a child stream. Same (seed, label) -> same stream, always.
    static Rng substream(std::uint64_t root_seed, std::string_view label) {
        return Rng(mix(root_seed ^ fnv1a(label)));
    }
    /// Derive a child stream keyed by label and index (e.g. rollout number).
    static Rng substream(std::uint64_t root_seed, std::string_view label, std::uint64_t index) {
        return Rng(mix(mix(root_seed ^ fnv1a(label)) + index));
    }

    double normal(double mean, double stddev) {
        std::normal_distribution<double> d(mean, stddev);
        return d(engine_);
    }
    double uniform(double lo, double hi) {
        std::uniform_real_distribution<double> d(lo, hi);
        return d(engine_);
    }
    std::uint64_t next_u64() { return engine_(); }

    std::mt19937_64& engine() { return engine_; }

    /// FNV-1a 64-bit; also used for manifest content digests.
    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 14695981039346656037ull;
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        return h;
    }

private:
    // splitmix64 finalizer, decorrelates nearby seeds
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
};

}  // namespace microswim
