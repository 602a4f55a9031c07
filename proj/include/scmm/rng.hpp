#pragma once

#include <cstdint>

namespace scmm {

/// splitmix64 finalizer; the mixing step of the counter-based generator.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent sub-seed from a parent seed and a stream tag.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

/// Counter-based generator: output n is mix64(key + n * golden). Identical
/// seeds reproduce identical streams, and trials use derive_seed sub-keys.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : key_(mix64(seed)) {}

    std::uint64_t next() { return mix64(key_ + 0x9e3779b97f4a7c15ULL * counter_++); }

    /// Uniform integer in [0, n) by rejection, n > 0.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % n;
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace scmm
