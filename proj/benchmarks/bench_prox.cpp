#include <benchmark/benchmark.h>

#include "moreau/catalog.hpp"
#include "moreau/envelope.hpp"
#include "moreau/expression.hpp"
#include "moreau/verify.hpp"

using namespace moreau;

namespace {

ProxSolveConfig grid() {
  ProxSolveConfig cfg;
  cfg.method = ProxMethod::grid;
  return cfg;
}

void BM_ClosedFormProx(benchmark::State& state) {
  const FunctionSpec f = catalog::double_well();
  const Point x{0.7};
  for (auto _ : state) benchmark::DoNotOptimize(prox_map(f, 0.1, x));
}
BENCHMARK(BM_ClosedFormProx);

void BM_GridProx1D(benchmark::State& state) {
  const FunctionSpec f = catalog::double_well();
  const ProxSolveConfig cfg = grid();
  const Point x{0.7};
  const double lambda = static_cast<double>(state.range(0)) / 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(prox_map(f, lambda, x, cfg));
}
BENCHMARK(BM_GridProx1D)->Arg(1)->Arg(10)->Arg(100);

void BM_GridProx2D(benchmark::State& state) {
  const FunctionSpec f = parse_function("(x1^2-1)^2 + x2^2 + 0.5*abs(x1-x2)", 2);
  const Point x{0.3, -0.7};
  const ProxSolveConfig cfg = grid();
  const double lambda = static_cast<double>(state.range(0)) / 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(prox_map(f, lambda, x, cfg));
}
BENCHMARK(BM_GridProx2D)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_DivergenceProbe(benchmark::State& state) {
  const FunctionSpec f = catalog::neg_quadratic(0.5);
  const Point x{1.0};
  for (auto _ : state) benchmark::DoNotOptimize(prox_map(f, 1.01, x));
}
BENCHMARK(BM_DivergenceProbe)->Unit(benchmark::kMillisecond);

void BM_ExpressionEval(benchmark::State& state) {
  const Expression e = Expression::parse("min(x1^2,(x1-2)^2+0.5) + abs(x1)*max(x1,0)", 1);
  Point x{0.3};
  for (auto _ : state) {
    x[0] += 1e-9;
    benchmark::DoNotOptimize(e.eval(x));
  }
}
BENCHMARK(BM_ExpressionEval);

void BM_MinTransfer(benchmark::State& state) {
  const FunctionSpec f = catalog::piecewise_min();
  const ProxSolveConfig cfg = grid();
  for (auto _ : state) benchmark::DoNotOptimize(check_min_transfer(f, Point{2.0}, 0.1, 0.3, cfg));
}
BENCHMARK(BM_MinTransfer)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
