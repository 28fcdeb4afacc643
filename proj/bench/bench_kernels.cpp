// Serial reference kernels against their OpenMP counterparts. Each parallel
// benchmark also checks that its result matches the serial one exactly.

#include <benchmark/benchmark.h>

#include "viral/equilibrium.hpp"
#include "viral/simulation.hpp"

using namespace viral;

namespace {

ModelParams bench_params(std::int64_t n) {
  ModelParams p;
  p.q = 0.51;
  p.K = 6;
  p.C = 3;
  p.lambda = 1.0;
  p.n = n;
  return p;
}

EnsembleOptions ensemble_options(int threads) {
  EnsembleOptions o;
  o.runs = 400;
  o.threads = threads;
  o.keep_runs = true;
  return o;
}

const Strategy& family_strategy() {
  static const Strategy s = deviation_family(6, 3).make(0.32);
  return s;
}

void BM_EnsembleSerial(benchmark::State& state) {
  const auto p = bench_params(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_ensemble_serial(family_strategy(), p, ensemble_options(1)));
  state.SetItemsProcessed(state.iterations() * 400 * state.range(0));
}

void BM_EnsembleParallel(benchmark::State& state) {
  const auto p = bench_params(state.range(0));
  const auto opts = ensemble_options(static_cast<int>(state.range(1)));
  const auto reference = run_ensemble_serial(family_strategy(), p, ensemble_options(1));
  for (auto _ : state) {
    auto res = run_ensemble(family_strategy(), p, opts);
    if (!(res.runs == reference.runs)) state.SkipWithError("parallel ensemble differs from the serial one");
    benchmark::DoNotOptimize(res);
  }
  state.SetItemsProcessed(state.iterations() * 400 * state.range(0));
}

PosteriorOptions posterior_options(int threads) {
  PosteriorOptions o;
  o.runs = 200;
  o.threads = threads;
  return o;
}

void BM_PosteriorsSerial(benchmark::State& state) {
  const auto p = bench_params(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(empirical_posteriors_serial(family_strategy(), p, {p.n}, posterior_options(1)));
  state.SetItemsProcessed(state.iterations() * 200 * state.range(0));
}

void BM_PosteriorsParallel(benchmark::State& state) {
  const auto p = bench_params(state.range(0));
  const auto reference = empirical_posteriors_serial(family_strategy(), p, {p.n}, posterior_options(1));
  const auto opts = posterior_options(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    auto t = empirical_posteriors(family_strategy(), p, {p.n}, opts);
    for (std::size_t c = 0; c < t[0].cells.size(); ++c)
      if (t[0].cells[c].belief != reference[0].cells[c].belief) {
        state.SkipWithError("parallel posteriors differ from the serial ones");
        break;
      }
    benchmark::DoNotOptimize(t);
  }
  state.SetItemsProcessed(state.iterations() * 200 * state.range(0));
}

}  // namespace

BENCHMARK(BM_EnsembleSerial)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleParallel)->ArgsProduct({{2000, 20000}, {1, 2, 4, 8}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PosteriorsSerial)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PosteriorsParallel)->ArgsProduct({{2000, 20000}, {1, 2, 4, 8}})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
