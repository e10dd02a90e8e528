// Serial reference vs OpenMP cell runner on reduced desk sweeps.
// Arg = worker count for the parallel path.

#include "mtirl/experiments.hpp"

#include <benchmark/benchmark.h>

using namespace mtirl;

namespace {

AggExpConfig agg_config() {
    AggExpConfig c = AggExpConfig::desk();
    c.trust_means = trust_mean_grid(55, 95, 10);
    c.trust_stds = {0.2};
    c.repeats = 4;
    return c;
}

GridExpConfig grid_config() {
    GridExpConfig c = GridExpConfig::desk();
    c.trust_means = {0.7, 0.8};
    c.variants = {Variant::review, Variant::unlimited};
    c.repeats = 2;
    return c;
}

void BM_AggregationSerial(benchmark::State& state) {
    const auto c = agg_config();
    for (auto _ : state) benchmark::DoNotOptimize(run_aggregation_experiment(c, Execution::serial));
}

void BM_AggregationParallel(benchmark::State& state) {
    const auto c = agg_config();
    const int jobs = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_aggregation_experiment(c, Execution::parallel, jobs));
}

void BM_GridworldSerial(benchmark::State& state) {
    const auto c = grid_config();
    const GridMap map = GridMap::default_map();
    for (auto _ : state) benchmark::DoNotOptimize(run_gridworld_experiment(c, map, Execution::serial));
}

void BM_GridworldParallel(benchmark::State& state) {
    const auto c = grid_config();
    const GridMap map = GridMap::default_map();
    const int jobs = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_gridworld_experiment(c, map, Execution::parallel, jobs));
}

}  // namespace

BENCHMARK(BM_AggregationSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_AggregationParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GridworldSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GridworldParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
