#include <benchmark/benchmark.h>

#include "salso/salso.hpp"

namespace {

using namespace salso;

DrawsMatrix bench_draws(std::size_t n, std::size_t h) {
    return synthetic_draws({.n = n, .k_true = 6, .h = h, .q = 0.4, .seed = 17});
}

// One full run (initialization, sweetening, zealous updates) as H grows.
void BM_RunOnceDraws(benchmark::State& state, LossKind kind) {
    const auto draws = bench_draws(100, static_cast<std::size_t>(state.range(0)));
    const LossEvaluator eval(draws, LossSpec{kind});
    SalsoConfig config;
    config.max_clusters = 12;
    std::size_t run = 0;
    for (auto _ : state) benchmark::DoNotOptimize(run_once(eval, config, run++).loss);
    state.SetComplexityN(state.range(0));
}
BENCHMARK_CAPTURE(BM_RunOnceDraws, binder, LossKind::Binder)->RangeMultiplier(2)->Range(100, 800)->Complexity();
BENCHMARK_CAPTURE(BM_RunOnceDraws, vi, LossKind::VI)->RangeMultiplier(2)->Range(100, 800)->Complexity();
BENCHMARK_CAPTURE(BM_RunOnceDraws, omari, LossKind::OMARI)->RangeMultiplier(2)->Range(100, 400)->Complexity();

void BM_RunOnceVilb(benchmark::State& state) {
    const auto draws = bench_draws(static_cast<std::size_t>(state.range(0)), 200);
    const LossEvaluator eval(draws, LossSpec{LossKind::VILB});
    SalsoConfig config;
    std::size_t run = 0;
    for (auto _ : state) benchmark::DoNotOptimize(run_once(eval, config, run++).loss);
}
BENCHMARK(BM_RunOnceVilb)->Arg(50)->Arg(100)->Arg(200);

// Scoring every placement of one item against all draws.
void BM_AllocationScores(benchmark::State& state, LossKind kind) {
    const auto draws = bench_draws(200, static_cast<std::size_t>(state.range(0)));
    TableCache cache(draws, 12);
    std::vector<int> labels(200);
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 10);
    labels[0] = TableCache::kUnallocated;
    cache.assign(labels);
    AllocationScorer scorer(LossSpec{kind}, draws.num_items());
    std::vector<double> out;
    for (auto _ : state) {
        scorer.scores(cache, 0, true, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK_CAPTURE(BM_AllocationScores, binder, LossKind::Binder)->Arg(100)->Arg(1000);
BENCHMARK_CAPTURE(BM_AllocationScores, gvi, LossKind::GVI)->Arg(100)->Arg(1000);
BENCHMARK_CAPTURE(BM_AllocationScores, nvi, LossKind::NVI)->Arg(100)->Arg(1000);

void BM_ExpectedLoss(benchmark::State& state, LossKind kind) {
    const auto draws = bench_draws(200, static_cast<std::size_t>(state.range(0)));
    const auto candidate = draws.row(0);
    for (auto _ : state) benchmark::DoNotOptimize(expected_loss(draws, candidate, LossSpec{kind}));
}
BENCHMARK_CAPTURE(BM_ExpectedLoss, binder, LossKind::Binder)->Arg(100)->Arg(1000);
BENCHMARK_CAPTURE(BM_ExpectedLoss, vi, LossKind::VI)->Arg(100)->Arg(1000);

void BM_Salso(benchmark::State& state) {
    const auto draws = bench_draws(100, 500);
    SalsoConfig config;
    config.n_runs = 16;
    config.n_workers = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(salso::salso(draws, LossSpec{LossKind::VI}, config).expected_loss);
}
BENCHMARK(BM_Salso)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

} // namespace

BENCHMARK_MAIN();
