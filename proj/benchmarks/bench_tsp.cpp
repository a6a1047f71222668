#include <benchmark/benchmark.h>

#include "ael/tsp/heuristics.hpp"
#include "ael/tsp/instance.hpp"
#include "ael/tsp/solvers.hpp"

namespace {

void BM_GreedyTour(benchmark::State& state) {
    const auto inst = ael::tsp::generate_instance(static_cast<std::size_t>(state.range(0)), 11);
    for (auto _ : state) benchmark::DoNotOptimize(ael::tsp::construct_greedy_tour(inst).length);
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GreedyTour)->RangeMultiplier(2)->Range(50, 1600)->Complexity();

void BM_ScoredTour(benchmark::State& state) {
    const auto inst = ael::tsp::generate_instance(static_cast<std::size_t>(state.range(0)), 11);
    const ael::tsp::ScoredParams params{1.0, 0.75, 0.5, 0.25};
    for (auto _ : state) benchmark::DoNotOptimize(ael::tsp::construct_scored_tour(inst, params).length);
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ScoredTour)->RangeMultiplier(2)->Range(50, 1600)->Complexity();

void BM_TwoOptBaseline(benchmark::State& state) {
    const auto inst = ael::tsp::generate_instance(static_cast<std::size_t>(state.range(0)), 11);
    for (auto _ : state) benchmark::DoNotOptimize(ael::tsp::two_opt_baseline(inst, 1));
}
BENCHMARK(BM_TwoOptBaseline)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_HeldKarp(benchmark::State& state) {
    const auto inst = ael::tsp::generate_instance(static_cast<std::size_t>(state.range(0)), 11);
    for (auto _ : state) benchmark::DoNotOptimize(ael::tsp::held_karp(inst));
}
BENCHMARK(BM_HeldKarp)->DenseRange(8, 13, 1)->Unit(benchmark::kMillisecond);

}  // namespace
