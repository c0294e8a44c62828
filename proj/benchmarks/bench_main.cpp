#include <benchmark/benchmark.h>

#include "gslr/lifting.hpp"
#include "gslr/phantom.hpp"
#include "gslr/sampling.hpp"
#include "gslr/solver.hpp"

namespace {

gslr::KArray phantom_kspace(int n)
{
  gslr::SyntheticSpec spec;
  spec.grid = gslr::KGrid(n, n);
  spec.seed = 3;
  return gslr::make_synthetic(spec).kspace;
}

void BM_GramFast(benchmark::State &state)
{
  const int n = static_cast<int>(state.range(0));
  const int f = static_cast<int>(state.range(1));
  const gslr::KArray x = phantom_kspace(n);
  for (auto _ : state)
    benchmark::DoNotOptimize(gslr::gram_matrix(x, 1, gslr::filter_support(f, f), true));
}
BENCHMARK(BM_GramFast)->Args({64, 7})->Args({128, 7})->Args({256, 7})->Unit(benchmark::kMillisecond);

void BM_GramExplicit(benchmark::State &state)
{
  const int n = static_cast<int>(state.range(0));
  const gslr::KArray x = phantom_kspace(n);
  for (auto _ : state)
    benchmark::DoNotOptimize(gslr::gram_matrix(x, 1, gslr::filter_support(7, 7), false));
}
BENCHMARK(BM_GramExplicit)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_WeightsAndMask(benchmark::State &state)
{
  const int n = static_cast<int>(state.range(0));
  const gslr::KArray x = phantom_kspace(n);
  const auto g = gslr::gram_matrix(x, 1, gslr::filter_support(7, 7), true);
  for (auto _ : state) {
    const auto bank = gslr::weight_sqrt_columns(g, x.grid, gslr::filter_support(7, 7), 0.0, 1e-3 * g.norm());
    benchmark::DoNotOptimize(gslr::filter_spectrum_mask(bank));
  }
}
BENCHMARK(BM_WeightsAndMask)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_LiftedQuadraticApply(benchmark::State &state)
{
  const int n = static_cast<int>(state.range(0));
  const gslr::KArray x = phantom_kspace(n);
  const auto w = gslr::component_weights(x, 1, gslr::filter_support(7, 7), 0.0, 1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(w.quadratic.apply(x.data));
}
BENCHMARK(BM_LiftedQuadraticApply)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

// One weighted least-squares step with each inner solver at the same iteration budget.
void BM_InnerSolve(benchmark::State &state)
{
  const auto inner = static_cast<gslr::InnerSolver>(state.range(0));
  const gslr::KArray x = phantom_kspace(64);
  const gslr::Mask mask = gslr::variable_density_mask(x.grid, {4.0, 3.0, 0.02, 1});
  const gslr::KArray b = gslr::measure(x, mask, {});
  const gslr::KArray zero(x.grid, 1);
  gslr::ReconConfig cfg;
  cfg.lambda1 = cfg.lambda2 = 1e-2;
  const auto w1 = gslr::component_weights(b, 1, cfg.filter1, 0.0, 1.0);
  const auto w2 = gslr::component_weights(b, 2, cfg.filter2, 0.0, 1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(inner == gslr::InnerSolver::cg
                               ? gslr::cg_least_squares(b, mask, &w1, &w2, cfg, b, zero)
                               : gslr::admm_least_squares(b, mask, &w1, &w2, cfg, b, zero));
  state.SetLabel(gslr::to_string(inner));
}
BENCHMARK(BM_InnerSolve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Reconstruct(benchmark::State &state)
{
  const int n = static_cast<int>(state.range(0));
  const gslr::KArray x = phantom_kspace(n);
  const gslr::Mask mask = gslr::variable_density_mask(x.grid, {4.0, 3.0, 0.02, 1});
  const gslr::KArray b = gslr::measure(x, mask, {});
  gslr::ReconConfig cfg;
  cfg.outer_iters = 5;
  for (auto _ : state)
    benchmark::DoNotOptimize(gslr::irls_reconstruct(b, mask, cfg));
}
BENCHMARK(BM_Reconstruct)->Arg(64)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
