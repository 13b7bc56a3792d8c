#include <benchmark/benchmark.h>

#include "udn/diagnostics.hpp"
#include "udn/mcsim.hpp"

namespace {

using namespace udn;

SimConfig config(double lambda, SimMode mode) {
  SimConfig sc;
  sc.base.lambda = lambda;
  sc.mode = mode;
  return sc;
}

// Throughput of simulate(); per-run setup (disc radius, tail interference) is
// amortized over the drops.
void run_drops(benchmark::State& state, SimMode mode) {
  ScopedWarningSink quiet{WarningSink{}};
  auto sc = config(static_cast<double>(state.range(0)), mode);
  sc.n_drops = state.range(1);
  sc.workers = 1;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(sc).drops.size());
  state.SetItemsProcessed(state.iterations() * sc.n_drops);
}

void BM_ModelFaithfulDrops(benchmark::State& state) { run_drops(state, SimMode::ModelFaithful); }
BENCHMARK(BM_ModelFaithfulDrops)->Args({1, 2000})->Args({100, 2000})->Args({10000, 2000})->Unit(benchmark::kMillisecond);

void BM_FullDrops(benchmark::State& state) { run_drops(state, SimMode::FullDrop); }
BENCHMARK(BM_FullDrops)->Args({1, 200})->Args({100, 500})->Args({1000, 2000})->Args({10000, 2000})
    ->Unit(benchmark::kMillisecond);

}  // namespace
