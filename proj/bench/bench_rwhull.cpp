#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "rwhull/geometry.hpp"
#include "rwhull/montecarlo.hpp"
#include "rwhull/rng.hpp"

using namespace rwhull;

namespace {

ExperimentConfig experiment(std::size_t steps) {
    ExperimentConfig cfg;
    cfg.walks = {StepDistribution::gaussian({1, 0}, Cov2::isotropic(1)),
                 StepDistribution::gaussian({0, 1}, Cov2::isotropic(1))};
    cfg.steps = steps;
    cfg.reps = 64;
    cfg.seed = 1;
    return cfg;
}

void BM_experiment_serial(benchmark::State& state) {
    const auto cfg = experiment(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(run_experiment_serial(cfg));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.reps));
}

void BM_experiment_openmp(benchmark::State& state) {
    const auto cfg = experiment(static_cast<std::size_t>(state.range(0)));
    const Parallelism par{static_cast<int>(state.range(1))};
    for (auto _ : state) benchmark::DoNotOptimize(run_experiment(cfg, par));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.reps));
}

ConvexPolygon ellipse(std::size_t vertices) {
    std::vector<Point2> pts;
    for (std::size_t k = 0; k < vertices; ++k) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(vertices);
        pts.push_back({3.0 * std::cos(t), std::sin(t)});
    }
    return convex_hull(pts);
}

void BM_range_sweep(benchmark::State& state) {
    const auto poly = ellipse(static_cast<std::size_t>(state.range(0)));
    const AngleGrid grid{static_cast<std::size_t>(state.range(1))};
    for (auto _ : state) benchmark::DoNotOptimize(range_profile(poly, grid));
}

void BM_range_per_angle(benchmark::State& state) {
    const auto poly = ellipse(static_cast<std::size_t>(state.range(0)));
    const AngleGrid grid{static_cast<std::size_t>(state.range(1))};
    for (auto _ : state) {
        std::vector<double> r(grid.count + 1);
        for (std::size_t j = 0; j <= grid.count; ++j) r[j] = range_fn(poly, grid.angle(j));
        benchmark::DoNotOptimize(r);
    }
}

}  // namespace

BENCHMARK(BM_experiment_serial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_experiment_openmp)->Args({1000, 1})->Args({1000, 4})->Args({10000, 1})->Args({10000, 4})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_range_sweep)->Args({64, 4096})->Args({1024, 4096})->Args({1024, 16384});
BENCHMARK(BM_range_per_angle)->Args({64, 4096})->Args({1024, 4096})->Args({1024, 16384});

BENCHMARK_MAIN();
