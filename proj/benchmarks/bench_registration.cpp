// Microbenchmarks for the per-stage costs and a small end-to-end run.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "jssr/block_match.hpp"
#include "jssr/grid.hpp"
#include "jssr/parallel.hpp"
#include "jssr/pipeline.hpp"
#include "jssr/regression.hpp"
#include "jssr/saliency.hpp"
#include "jssr/tensor.hpp"

namespace {

jssr::ScalarImage textured(int n, unsigned seed) {
    jssr::ScalarImage img(jssr::GridDims{n, n});
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (double& v : img.data) v = uni(rng);
    return jssr::gaussian_smooth(jssr::normalize_minmax(img), 1.2);
}

void bench_lst(benchmark::State& state) {
    const auto img = textured(static_cast<int>(state.range(0)), 7);
    for (auto _ : state)
        benchmark::DoNotOptimize(jssr::lst(jssr::gst(img)));
}
BENCHMARK(bench_lst)->Arg(128)->Arg(256);

void bench_saliency(benchmark::State& state) {
    const auto img = textured(static_cast<int>(state.range(0)), 7);
    const auto tensors = jssr::lst(jssr::gst(img));
    for (auto _ : state)
        benchmark::DoNotOptimize(jssr::saliency(tensors));
}
BENCHMARK(bench_saliency)->Arg(128)->Arg(256);

void bench_mutual_information(benchmark::State& state) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<double> a(121), b(121);
    for (auto& v : a) v = uni(rng);
    for (auto& v : b) v = uni(rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(jssr::mutual_information(a, b, 16));
}
BENCHMARK(bench_mutual_information);

void bench_match_blocks(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto ref = textured(n, 3);
    const auto mov = textured(n, 4);
    jssr::ScalarImage certainty(ref.dims);
    for (double& v : certainty.data) v = 1.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(jssr::match_blocks(ref, mov, certainty, 4, 5, 5));
}
BENCHMARK(bench_match_blocks)->Arg(128);

void bench_densify(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto ref = textured(n, 3);
    const auto tensors = jssr::lst(jssr::gst(ref));
    jssr::SparseDisplacements sparse;
    sparse.level_dims = ref.dims;
    for (int y = 2; y < n; y += 4)
        for (int x = 2; x < n; x += 4)
            sparse.samples.push_back(
                {jssr::Vec3{double(x), double(y), 0}, jssr::Vec3{1.0, -0.5, 0}, 0.8});
    const jssr::RegressionConfig cfg;
    for (auto _ : state)
        benchmark::DoNotOptimize(jssr::densify(sparse, tensors, cfg));
}
BENCHMARK(bench_densify)->Arg(128);

void bench_register_small(benchmark::State& state) {
    const auto ref = textured(64, 3);
    jssr::DisplacementField shift(ref.dims);
    for (auto& v : shift.vectors) v = jssr::Vec3{2.0, 1.0, 0.0};
    const auto mov = jssr::warp(ref, shift);
    jssr::RegistrationConfig cfg;
    cfg.levels = 3;
    cfg.iterations_per_level = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(jssr::register_images(ref, mov, cfg));
}
BENCHMARK(bench_register_small)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
