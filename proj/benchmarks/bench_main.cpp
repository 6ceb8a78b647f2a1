#include <benchmark/benchmark.h>

#include <Eigen/Core>

#include "expertgame/game.hpp"
#include "expertgame/local.hpp"
#include "expertgame/pde.hpp"
#include "expertgame/quadrature.hpp"

using namespace expertgame;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

ExpertPanel flagship() {
  return ExpertPanel::static_panel(1, vec2(1.0, -1.0), 1);
}

void BM_PathEngine(benchmark::State& state) {
  ExpertPanel panel = ExpertPanel::random_panel(2, 2, 8, 1);
  Payoff g = Payoff::max();
  int N = static_cast<int>(state.range(0)) + 1;
  GameSpec spec{panel, g, N, 1, Eigen::VectorXd::Zero(2), HistoryState(2, 0)};
  for (auto _ : state) benchmark::DoNotOptimize(value_exact(spec));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PathEngine)->Arg(12)->Arg(16)->Arg(20)->Complexity();

void BM_LatticeEngine(benchmark::State& state) {
  ExpertPanel panel = flagship();
  Payoff g = Payoff::max();
  int N = static_cast<int>(state.range(0));
  EngineOptions opts;
  opts.engine = Engine::lattice;
  GameSpec spec{panel, g, N, 1, Eigen::VectorXd::Zero(2), HistoryState(1, 0)};
  for (auto _ : state) benchmark::DoNotOptimize(value_exact(spec, opts));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LatticeEngine)->Arg(256)->Arg(1024)->Arg(4096)->Complexity();

void BM_BruteEngine(benchmark::State& state) {
  ExpertPanel panel = ExpertPanel::random_panel(2, 1, 8, 2);
  Payoff g = Payoff::max();
  int depth = static_cast<int>(state.range(0));
  GameSpec spec{panel, g, depth + 1, 1, Eigen::VectorXd::Zero(2),
                HistoryState(1, 0)};
  for (auto _ : state)
    benchmark::DoNotOptimize(value_bruteforce(spec, 1e-3));
}
BENCHMARK(BM_BruteEngine)->Arg(2)->Arg(3)->Arg(4);

void BM_TreeTable(benchmark::State& state) {
  ExpertPanel panel = ExpertPanel::random_panel(3, 3, 8, 3);
  HessianContext ctx(Eigen::MatrixXd::Identity(3, 3),
                     Eigen::VectorXd::Ones(3));
  int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(h_recursive(ctx, panel, k));
}
BENCHMARK(BM_TreeTable)->Arg(16)->Arg(64);

void BM_AdaptiveExpectation(benchmark::State& state) {
  for (auto _ : state) {
    double v = expect_normal(
        [](const double* z) { return std::abs(z[0]); }, 1, 1e-9);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_AdaptiveExpectation);

void BM_PdeValue(benchmark::State& state) {
  PdeSolution sol(flagship(), Payoff::max());
  Eigen::VectorXd x = vec2(0.2, -0.3);
  for (auto _ : state) benchmark::DoNotOptimize(sol.u(x, 0.25));
}
BENCHMARK(BM_PdeValue);

void BM_PdeDerivatives(benchmark::State& state) {
  PdeSolution sol(flagship(), Payoff::max());
  Eigen::VectorXd x = vec2(0.2, -0.3);
  for (auto _ : state)
    benchmark::DoNotOptimize(sol.derivatives(x, 0.25, DerivMode::quadrature));
}
BENCHMARK(BM_PdeDerivatives);

}  // namespace

BENCHMARK_MAIN();
