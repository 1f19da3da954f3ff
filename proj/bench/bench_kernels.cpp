// Serial reference loop vs the OpenMP kernel for the three replicate batches.
// The argument is the replicate count; the serial run uses Execution::Serial,
// the parallel run the OpenMP default thread count.

#include "affinelab/kernels.hpp"

#include <benchmark/benchmark.h>

using namespace affinelab;

namespace {

ExecutionPolicy policy_for(bool parallel) {
  return parallel ? ExecutionPolicy{Execution::Parallel, 0} : ExecutionPolicy{Execution::Serial, 0};
}

void estimator_batch_bench(benchmark::State& state, bool parallel) {
  SeriesBatchSpec spec;
  spec.params.a = 1.0;
  spec.params.m = 1.0;
  spec.n_obs = 200;
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(estimator_batch(spec, 42, 0, count, policy_for(parallel)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void limit_functional_batch_bench(benchmark::State& state, bool parallel) {
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(limit_functional_batch(1.0, 1.0, 1024, 42, 1, count, policy_for(parallel)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void terminal_state_batch_bench(benchmark::State& state, bool parallel) {
  ModelParams params;
  params.a = 1.0;
  params.m = 2.0;
  const InitialLaw init{1.0, 0.0};
  const TimeGrid grid{0.0, 3.0, 384};
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(terminal_state_batch(params, init, grid, {}, 42, 0, count, policy_for(parallel)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK_CAPTURE(estimator_batch_bench, serial, false)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(estimator_batch_bench, parallel, true)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(limit_functional_batch_bench, serial, false)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(limit_functional_batch_bench, parallel, true)->Arg(1024)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(terminal_state_batch_bench, serial, false)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(terminal_state_batch_bench, parallel, true)->Arg(4096)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
