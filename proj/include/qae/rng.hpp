#pragma once
#include <cstdint>
#include <random>

namespace qae {

// splitmix64: used to scramble user seeds and to derive per-run streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Stream for run k of a multi-run experiment: mix the run index into the
// root seed so repetitions are independent yet fully reproducible.
inline std::uint64_t derive_run_seed(std::uint64_t root_seed, std::uint64_t run_index) {
    return splitmix64(root_seed ^ splitmix64(run_index + 1));
}

// All randomness in the library flows through this wrapper; no global RNG.
// Sampling primitives avoid std::*_distribution so that a given seed yields
// the same draws on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0, 1) with 53 bits of precision.
    double uniform_double() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound), bound >= 1. Masked rejection sampling.
    std::uint64_t uniform_below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        std::uint64_t mask = bound - 1;
        mask |= mask >> 1;
        mask |= mask >> 2;
        mask |= mask >> 4;
        mask |= mask >> 8;
        mask |= mask >> 16;
        mask |= mask >> 32;
        std::uint64_t v;
        do {
            v = engine_() & mask;
        } while (v >= bound);
        return v;
    }

    // Uniform integer in [lo, hi] inclusive.
    std::uint64_t uniform_range(std::uint64_t lo, std::uint64_t hi) {
        return lo + uniform_below(hi - lo + 1);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace qae
