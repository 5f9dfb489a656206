#include <benchmark/benchmark.h>

#include "plap/expressions.hpp"
#include "plap/grid.hpp"
#include "plap/solver.hpp"

namespace {

plap::ProblemSpec radial_problem(int n) {
  auto g = plap::build_grid(n, true);
  return plap::make_problem(g, 3.0, plap::parse_expression("const:1"), plap::parse_expression("zero"));
}

void BM_Solve(benchmark::State& state) {
  const plap::ProblemSpec spec = radial_problem(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(plap::solve(spec).residual_sup);
}
BENCHMARK(BM_Solve)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Residual(benchmark::State& state) {
  const plap::ProblemSpec spec = radial_problem(static_cast<int>(state.range(0)));
  const plap::GridFunction u = plap::sample(spec.f.grid, [](const plap::Vec2& x) { return 1.0 - x.squaredNorm(); });
  for (auto _ : state) benchmark::DoNotOptimize(plap::residual(u, spec, 1e-4).values.data());
}
BENCHMARK(BM_Residual)->Arg(64)->Arg(256);

void BM_RecoverGradient(benchmark::State& state) {
  auto g = plap::build_grid(static_cast<int>(state.range(0)), false);
  const plap::GridFunction u = plap::sample(g, plap::parse_expression("sincos"));
  for (auto _ : state) benchmark::DoNotOptimize(plap::recover_gradient(u).values.data());
}
BENCHMARK(BM_RecoverGradient)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
