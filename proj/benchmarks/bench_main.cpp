#include <benchmark/benchmark.h>

#include <numbers>

#include "fracflow/flow.hpp"
#include "fracflow/fraclap.hpp"
#include "fracflow/functionals.hpp"
#include "fracflow/random_fields.hpp"
#include "fracflow/stability.hpp"

using namespace fracflow;

namespace {

GeometryPtr geometry_for(int which, int size) {
    switch (which) {
        case 0: return make_torus(1, 2 * std::numbers::pi, size, 0.3);
        case 1: return make_torus(2, 2 * std::numbers::pi, size, 0.5);
        default: return make_sphere(2, size, 0.5);
    }
}

// Args: geometry (0 = 1D torus, 1 = 2D torus, 2 = S²), size.
void BM_Transform(benchmark::State& state) {
    const auto g = geometry_for(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    CounterRng rng(1);
    const auto f = random_field(g, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(g->to_coeffs(g->to_grid(f.coeffs())));
    }
}
BENCHMARK(BM_Transform)->Args({0, 64})->Args({0, 256})->Args({1, 32})->Args({2, 16})->Args({2, 32});

void BM_ApplyP(benchmark::State& state) {
    const auto g = geometry_for(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    CounterRng rng(2);
    const auto f = random_field(g, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fraclap::apply_P(f));
    }
}
BENCHMARK(BM_ApplyP)->Args({0, 64})->Args({1, 32})->Args({2, 32});

void BM_Curvature(benchmark::State& state) {
    const auto g = geometry_for(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    CounterRng rng(3);
    const auto u = random_positive_field(g, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_curvature(u));
    }
}
BENCHMARK(BM_Curvature)->Args({0, 64})->Args({2, 16});

void BM_FlowStep(benchmark::State& state) {
    const auto g = geometry_for(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    CounterRng rng(4);
    const auto s0 = make_state(random_positive_field(g, rng, 0.2), 1e-3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(step(s0, 1e-3));
    }
}
BENCHMARK(BM_FlowStep)->Args({0, 64})->Args({1, 32})->Args({2, 16});

void BM_WeightedEigs(benchmark::State& state) {
    const auto g = geometry_for(2, static_cast<int>(state.range(0)));
    CounterRng rng(5);
    const auto u = random_positive_field(g, rng, 0.3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(weighted_eigs(u, 20));
    }
}
BENCHMARK(BM_WeightedEigs)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
