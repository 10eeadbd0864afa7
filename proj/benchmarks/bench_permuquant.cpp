#include <benchmark/benchmark.h>

#include <vector>

#include "permuquant/hadamard.hpp"
#include "permuquant/matrix.hpp"
#include "permuquant/quant.hpp"
#include "permuquant/reorder.hpp"
#include "permuquant/rng.hpp"
#include "permuquant/stats.hpp"
#include "permuquant/synthetic.hpp"

namespace pq = permuquant;

namespace {

pq::Matrix make_acts(std::size_t tokens, std::size_t d) {
    pq::Rng rng(7);
    return pq::heavy_tailed_activations(rng, tokens, d, 1.0);
}

void BM_quantize_rows(benchmark::State& state) {
    const std::size_t d = static_cast<std::size_t>(state.range(0));
    const pq::Matrix x = make_acts(64, d);
    pq::QuantConfig cfg;
    cfg.bits = 3;
    cfg.group_size = 32;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pq::quantize_rows(x, cfg));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(x.rows() * x.cols()));
}
BENCHMARK(BM_quantize_rows)->Arg(128)->Arg(512)->Arg(2048);

void BM_fwht(benchmark::State& state) {
    const std::size_t d = static_cast<std::size_t>(state.range(0));
    pq::Rng rng(7);
    std::vector<double> x(d);
    for (double& v : x) v = rng.normal();
    const std::size_t block = pq::largest_pow2_block(d);
    for (auto _ : state) {
        pq::fwht_inplace(x, block);
        benchmark::DoNotOptimize(x.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(d));
}
BENCHMARK(BM_fwht)->Arg(256)->Arg(1024)->Arg(4096);

void BM_matmul(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    pq::Rng rng(7);
    pq::Matrix a(n, n);
    pq::Matrix b(n, n);
    for (double& v : a.data()) v = rng.normal();
    for (double& v : b.data()) v = rng.normal();
    for (auto _ : state) {
        benchmark::DoNotOptimize(pq::matmul(a, b));
    }
}
BENCHMARK(BM_matmul)->Arg(64)->Arg(128)->Arg(256);

void BM_channel_second_moments(benchmark::State& state) {
    const pq::Matrix x = make_acts(256, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(pq::channel_second_moments(x));
    }
}
BENCHMARK(BM_channel_second_moments)->Arg(512)->Arg(2048);

void BM_select_permutation(benchmark::State& state) {
    const std::size_t d = static_cast<std::size_t>(state.range(0));
    pq::Rng rng(7);
    pq::LayerSpec layer;
    layer.calib_acts = pq::heavy_tailed_activations(rng, 64, d, 1.0);
    layer.weight = pq::gaussian_weights(rng, d, d / 2, 0.5);
    layer.predecessor = pq::Predecessor::linear;
    pq::QuantConfig cfg;
    cfg.bits = 3;
    cfg.group_size = 32;
    const std::vector<double> grid = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(pq::select_permutation(layer, cfg, grid, 0.0));
    }
}
BENCHMARK(BM_select_permutation)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
