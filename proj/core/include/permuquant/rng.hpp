#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace permuquant {

// Deterministic random source. mt19937_64 output is fixed by the standard;
// the mappings to doubles below are hand-rolled because the std
// distributions are implementation-defined and would break cross-platform
// reproducibility of seeds.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; no cached spare, two uniforms per draw.
    double normal();

    double lognormal(double sigma) { return std::exp(sigma * normal()); }

    // Uniform index in [0, n); n must be positive.
    std::size_t index(std::size_t n);

    // Fisher-Yates shuffle of 0..n-1.
    std::vector<std::size_t> shuffled_indices(std::size_t n);

private:
    std::mt19937_64 engine_;
};

}  // namespace permuquant
