#include "permuquant/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "permuquant/manifest.hpp"
#include "permuquant/tensor_io.hpp"

namespace permuquant {

Matrix heavy_tailed_activations(Rng& rng, std::size_t tokens, std::size_t d, double spread) {
    std::vector<double> scales(d);
    for (double& s : scales) s = rng.lognormal(spread);
    Matrix x(tokens, d);
    for (std::size_t r = 0; r < tokens; ++r) {
        for (std::size_t c = 0; c < d; ++c) x(r, c) = scales[c] * rng.normal();
    }
    return x;
}

Matrix two_population_activations(Rng& rng, std::size_t tokens, std::size_t d,
                                  double mu2_ratio) {
    if (!(mu2_ratio > 0.0)) {
        throw std::invalid_argument("two_population_activations: mu2_ratio must be > 0");
    }
    const double hot = std::sqrt(mu2_ratio);
    Matrix x(tokens, d);
    for (std::size_t r = 0; r < tokens; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            const double scale = (c % 2 == 0) ? hot : 1.0;
            x(r, c) = scale * rng.normal();
        }
    }
    return x;
}

Matrix gaussian_weights(Rng& rng, std::size_t d_in, std::size_t d_out, double spread) {
    std::vector<double> scales(d_in);
    for (double& s : scales) s = rng.lognormal(spread);
    Matrix w(d_in, d_out);
    for (std::size_t r = 0; r < d_in; ++r) {
        for (std::size_t c = 0; c < d_out; ++c) w(r, c) = scales[r] * rng.normal();
    }
    return w;
}

void write_synthetic_dataset(const std::filesystem::path& out_dir,
                             const SyntheticConfig& cfg) {
    if (cfg.layers == 0 || cfg.d == 0 || cfg.d_out == 0 || cfg.tokens == 0) {
        throw std::invalid_argument("write_synthetic_dataset: all sizes must be positive");
    }
    std::filesystem::create_directories(out_dir / "tensors");

    const Predecessor cycle[] = {Predecessor::linear, Predecessor::rmsnorm,
                                 Predecessor::layernorm_modulated, Predecessor::none};
    Rng rng(cfg.seed);
    Manifest manifest;
    for (std::size_t i = 0; i < cfg.layers; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "layer_%03zu", i);

        Matrix acts = (i % 2 == 0)
                          ? heavy_tailed_activations(rng, cfg.tokens, cfg.d, cfg.spread)
                          : two_population_activations(rng, cfg.tokens, cfg.d,
                                                       100.0 * std::max(cfg.spread, 0.01));
        Matrix weight = gaussian_weights(rng, cfg.d, cfg.d_out, 0.5 * cfg.spread);

        const std::string acts_rel = std::string("tensors/") + name + "_acts.pqt";
        const std::string weight_rel = std::string("tensors/") + name + "_weight.pqt";
        save_tensor(out_dir / acts_rel, acts, DType::f64);
        save_tensor(out_dir / weight_rel, weight, DType::f64);

        ManifestEntry entry;
        entry.name = name;
        entry.acts_path = acts_rel;
        entry.weight_path = weight_rel;
        entry.predecessor = cycle[i % 4];
        manifest.layers.push_back(entry);
    }
    save_manifest(out_dir / "manifest.json", manifest);
}

}  // namespace permuquant
