#include <benchmark/benchmark.h>

#include "bayalign/sampler.hpp"

using namespace bayalign;

namespace {

Coords helix(int n, double phase) {
  Coords c(n, 3);
  for (int i = 0; i < n; ++i) c.row(i) << 2.3 * std::cos(1.745 * i + phase), 2.3 * std::sin(1.745 * i + phase), 1.5 * i;
  return c;
}

AlignmentProblem problem(int n) {
  AlignmentProblem p;
  p.x = helix(n, 0.0);
  p.y = helix(n + n / 10, 0.3);
  return p;
}

}  // namespace

static void BM_Forward(benchmark::State& state) {
  const AlignmentProblem p = problem(static_cast<int>(state.range(0)));
  std::vector<std::pair<int, int>> diagonal;
  for (int i = 0; i < p.n(); ++i) diagonal.emplace_back(i, i);
  const ModelState s = make_state(p, AlignmentPath::from_pairs(p.n(), p.m(), diagonal), 1.0, {});
  const DpWeights w = conditional_weights(p, s, s.reg);
  for (auto _ : state) benchmark::DoNotOptimize(forward(w).total());
  state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_Forward)->RangeMultiplier(2)->Range(32, 256)->Complexity(benchmark::oN);

static void BM_Superpose(benchmark::State& state) {
  const Coords x = helix(static_cast<int>(state.range(0)), 0.0);
  const Coords y = helix(static_cast<int>(state.range(0)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(superpose(x, y).dp2);
}
BENCHMARK(BM_Superpose)->Arg(50)->Arg(150);

static void BM_Sweep(benchmark::State& state) {
  const AlignmentProblem p = problem(static_cast<int>(state.range(0)));
  const FragmentLibrary lib = build_fragment_library(p.x, p.y, 1.0);
  ChainConfig cfg;
  cfg.iterations = 20;
  cfg.burn_in = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_chain(p, Hyperparams{}, cfg, lib).size());
  state.SetItemsProcessed(state.iterations() * cfg.iterations);
}
BENCHMARK(BM_Sweep)->Arg(60)->Arg(150)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
