#include <benchmark/benchmark.h>

#include "fastalm/functions.hpp"
#include "fastalm/linops.hpp"
#include "fastalm/problems.hpp"
#include "fastalm/rng.hpp"
#include "fastalm/solvers.hpp"

namespace {

using namespace fastalm;

void BM_ProxL1(benchmark::State& state) {
  Rng rng(1);
  const Matrix a = rng.normal_matrix(state.range(0), state.range(0));
  const ProxFn h = ProxFn::l1(0.1);
  for (auto _ : state) benchmark::DoNotOptimize(h.prox(a, 0.5));
}
BENCHMARK(BM_ProxL1)->Arg(100)->Arg(300);

void BM_ProxL21(benchmark::State& state) {
  Rng rng(1);
  const Matrix a = rng.normal_matrix(state.range(0), state.range(0));
  const ProxFn h = ProxFn::l21(0.1);
  for (auto _ : state) benchmark::DoNotOptimize(h.prox(a, 0.5));
}
BENCHMARK(BM_ProxL21)->Arg(100)->Arg(300);

void BM_ProxNuclear(benchmark::State& state) {
  Rng rng(1);
  const Matrix a = rng.normal_matrix(state.range(0), state.range(0));
  const ProxFn h = ProxFn::nuclear(0.1);
  for (auto _ : state) benchmark::DoNotOptimize(h.prox(a, 0.5));
}
BENCHMARK(BM_ProxNuclear)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_OpNormSq(benchmark::State& state) {
  Rng rng(1);
  const LinearMap a = LinearMap::left_multiply(rng.normal_matrix(state.range(0), state.range(0)), state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(op_norm_sq(a));
}
BENCHMARK(BM_OpNormSq)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_SolverIterations(benchmark::State& state, Algorithm alg, bool three_block) {
  const BlockProblem p = three_block ? gen_three_block(state.range(0), kDefaultThreeBlockAlphas, 1)
                                     : gen_lasso_simplex(state.range(0), 3 * state.range(0), 1.0, 42);
  SolverConfig c;
  c.algorithm = alg;
  c.max_iters = 10;
  c.trace_every = 10;
  for (auto _ : state) benchmark::DoNotOptimize(run_solver(p, c));
  state.SetItemsProcessed(state.iterations() * c.max_iters);
}
BENCHMARK_CAPTURE(BM_SolverIterations, palm_lasso, Algorithm::kPalm, false)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SolverIterations, fast_palm_lasso, Algorithm::kFastPalm, false)
    ->Arg(100)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SolverIterations, pl_admm_ps_three_block, Algorithm::kPlAdmmPs, true)
    ->Arg(50)
    ->Arg(100)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SolverIterations, fast_pl_admm_ps_three_block, Algorithm::kFastPlAdmmPs, true)
    ->Arg(50)
    ->Arg(100)
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
