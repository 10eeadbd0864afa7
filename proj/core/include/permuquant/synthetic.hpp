#pragma once

#include <cstdint>
#include <filesystem>

#include "permuquant/matrix.hpp"
#include "permuquant/rng.hpp"

namespace permuquant {

// Gaussian channels with lognormal per-channel scales: scale_c =
// exp(spread * N(0,1)), x(r,c) = scale_c * N(0,1). spread 0 is white noise.
Matrix heavy_tailed_activations(Rng& rng, std::size_t tokens, std::size_t d, double spread);

// Two interleaved channel populations whose second moments differ by
// mu2_ratio: even channels get scale sqrt(mu2_ratio), odd channels 1.
Matrix two_population_activations(Rng& rng, std::size_t tokens, std::size_t d,
                                  double mu2_ratio);

// Gaussian weights with lognormal per-input-channel (row) scales.
Matrix gaussian_weights(Rng& rng, std::size_t d_in, std::size_t d_out, double spread);

struct SyntheticConfig {
    std::size_t layers = 4;
    std::size_t d = 64;
    std::size_t d_out = 32;
    std::size_t tokens = 128;
    double spread = 1.0;
    std::uint64_t seed = 0;
};

// Writes <out_dir>/manifest.json plus tensors/ with one weight/activation
// pair per layer. Layers alternate heavy-tailed and two-population
// activations and cycle through the predecessor kinds. Fully determined
// by cfg.seed.
void write_synthetic_dataset(const std::filesystem::path& out_dir, const SyntheticConfig& cfg);

}  // namespace permuquant
