#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "expertgame/strategy.hpp"

using namespace expertgame;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

ExpertPanel pm_panel(int d) {
  return ExpertPanel::static_panel(d, vec2(1.0, -1.0), 1);
}

}  // namespace

TEST_CASE("optimal play reproduces the game value") {
  Payoff g = Payoff::max();
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
    for (int n : {2, 3}) {
      for (int d : {1, 2}) {
        ExpertPanel p = ExpertPanel::random_panel(n, d, 8, seed);
        Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
        HistoryState m0(d, 0);
        int N = 9;
        GameSpec spec{p, g, N, 1, x0, m0};
        double v = value_exact(spec);
        ExactInvestor inv(p, g);
        ExhaustiveMarket mkt(p, g);
        Trajectory traj = simulate(p, g, N, x0, m0, inv, mkt, 7);
        CHECK(std::abs(traj.final_payoff - v) <= 1e-9);
        CHECK(traj.rounds.size() == static_cast<std::size_t>(N - 1));
      }
    }
  }
}

TEST_CASE("security of the exact players") {
  Payoff g = Payoff::max();
  ExpertPanel p = ExpertPanel::random_panel(2, 1, 8, 11);
  Eigen::VectorXd x0 = vec2(0.25, -0.5);
  HistoryState m0 = HistoryState::parse("+");
  int N = 8;
  GameSpec spec{p, g, N, 1, x0, m0};
  double v = value_exact(spec);

  // the exact investor concedes at most the value to any market
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    ExactInvestor inv(p, g);
    RandomMarket rnd;
    Trajectory traj = simulate(p, g, N, x0, m0, inv, rnd, seed);
    CHECK(traj.final_payoff <= v + 1e-9);
  }
  {
    ExactInvestor inv(p, g);
    ExhaustiveMarket mkt(p, g);
    CHECK(simulate(p, g, N, x0, m0, inv, mkt, 0).final_payoff <= v + 1e-9);
  }
  // the exhaustive market extracts at least the value from any investor
  {
    PdeSolution sol(p, g);
    GradientInvestor ginv(sol);
    ExhaustiveMarket mkt(p, g);
    CHECK(simulate(p, g, N, x0, m0, ginv, mkt, 0).final_payoff >= v - 1e-9);
  }
  {
    PdeSolution sol(p, g);
    BlockInvestor binv(sol, 2, N);
    ExhaustiveMarket mkt(p, g);
    CHECK(simulate(p, g, N, x0, m0, binv, mkt, 0).final_payoff >= v - 1e-9);
  }
}

TEST_CASE("gradient-weighted investor") {
  // linear payoff: the move is the weighted prediction exactly
  Eigen::VectorXd w = vec2(0.25, 0.75);
  ExpertPanel p = ExpertPanel::random_panel(2, 2, 8, 21);
  PdeSolution sol(p, Payoff::linear(w));
  GradientInvestor inv(sol);
  Eigen::VectorXd x = vec2(0.3, -0.3);
  std::mt19937_64 rng(0);
  for (const HistoryState& m : enumerate_states(2)) {
    RoundContext ctx{3, 16, x, m, &rng};
    double f = inv.move(ctx);
    CHECK(f == doctest::Approx(w.dot(p.q(m.code()))).epsilon(1e-6));
    CHECK(f >= -1.0);
    CHECK(f <= 1.0);
  }
  // symmetric regret under the max payoff balances the experts
  PdeSolution msol(pm_panel(1), Payoff::max());
  GradientInvestor minv(msol);
  RoundContext ctx{1, 16, Eigen::VectorXd::Zero(2),
                   HistoryState::parse("+"), &rng};
  CHECK(minv.move(ctx) == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(minv.clamp_count() == 0);
}

TEST_CASE("greedy market follows the sign of the first-order term") {
  PdeSolution sol(pm_panel(1), Payoff::max());
  std::mt19937_64 rng(0);
  Eigen::VectorXd x = vec2(0.8, -0.4);  // tilts the gradient to expert one
  RoundContext ctx{1, 64, x, HistoryState::parse("+"), &rng};
  GreedyMarket mkt(sol);
  // f = -1 forces <grad, q + 1> = 2 grad_1 > 0
  CHECK(mkt.move(ctx, -1.0) == Bit::up);
  // flipping the deviation flips the market
  CHECK(mkt.move(ctx, 1.0) == Bit::down);
  // the indifferent move ties and ties go up
  GradientInvestor inv(sol);
  double f = inv.move(ctx);
  CHECK(mkt.move(ctx, f) == Bit::up);
}

TEST_CASE("market at the horizon is a contract error") {
  ExpertPanel p = pm_panel(1);
  Payoff g = Payoff::max();
  ExhaustiveMarket mkt(p, g);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
  std::mt19937_64 rng(0);
  RoundContext ctx{4, 4, x, HistoryState::parse("+"), &rng};
  CHECK_THROWS_AS(static_cast<void>(mkt.move(ctx, 0.0)), HorizonTooLarge);
}

TEST_CASE("simulation bookkeeping") {
  ExpertPanel p = ExpertPanel::random_panel(2, 1, 8, 31);
  Payoff g = Payoff::max();
  // no moves remain when starting at the horizon
  ExactInvestor inv(p, g);
  RandomMarket mkt;
  Eigen::VectorXd x0 = vec2(0.4, 0.1);
  Trajectory empty =
      simulate(p, g, 5, x0, HistoryState::parse("+"), inv, mkt, 3, 5);
  CHECK(empty.rounds.empty());
  CHECK(empty.final_payoff == g(x0));

  // regret and history updates follow the round dynamics
  Trajectory traj =
      simulate(p, g, 6, x0, HistoryState::parse("-"), inv, mkt, 3);
  Eigen::VectorXd x = x0;
  HistoryState m = HistoryState::parse("-");
  for (const Round& r : traj.rounds) {
    CHECK(r.m == m);
    x += sign(r.b) * (p.q(m.code()).array() - r.f).matrix();
    CHECK((x - r.x).cwiseAbs().maxCoeff() == 0.0);
    m = m.shift(r.b);
    CHECK(r.running_payoff == g(r.x));
  }
  CHECK(traj.final_payoff == g(x));

  // deterministic given the seed
  Trajectory again =
      simulate(p, g, 6, x0, HistoryState::parse("-"), inv, mkt, 3);
  for (std::size_t i = 0; i < traj.rounds.size(); ++i)
    CHECK(traj.rounds[i].f == again.rounds[i].f);
}

TEST_CASE("random market with the hedged linear move conserves <w,x>") {
  Eigen::VectorXd w = vec2(0.5, 0.5);
  Payoff g = Payoff::linear(w);
  ExpertPanel p = ExpertPanel::random_panel(2, 2, 8, 41);

  struct Hedge : Investor {
    const ExpertPanel& panel;
    Eigen::VectorXd w;
    Hedge(const ExpertPanel& pp, Eigen::VectorXd ww) : panel(pp), w(ww) {}
    double move(const RoundContext& ctx) override {
      return w.dot(panel.q(ctx.m.code()));
    }
  };
  Hedge inv(p, w);
  RandomMarket mkt;
  Eigen::VectorXd x0 = vec2(0.7, -0.1);
  for (std::uint64_t seed : {0ull, 5ull, 9ull}) {
    Trajectory traj =
        simulate(p, g, 12, x0, HistoryState::parse("++"), inv, mkt, seed);
    // each round cancels in <w, .>; only rounding is left
    CHECK(std::abs(traj.final_payoff - w.dot(x0)) <= 1e-13);
  }
}

TEST_CASE("block investor structure") {
  ExpertPanel p = pm_panel(1);
  Payoff g = Payoff::max();
  PdeSolution sol(p, g);
  int N = 64;

  // with zero within-block history the move reduces to the weighted
  // prediction plus the frozen tree-sum correction
  BlockInvestor inv(sol, 4, N);
  std::mt19937_64 rng(0);
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(2);
  RoundContext ctx{1, N, x0, HistoryState::parse("+"), &rng};
  double f1 = inv.move(ctx);
  Derivs d = sol.derivatives(Eigen::VectorXd::Zero(2), 0.0,
                             DerivMode::quadrature);
  HTable table = h_recursive(HessianContext(d.hess, d.grad), p, 4);
  double eps = 1.0 / 8.0;
  double expect = (d.grad.dot(p.q(ctx.m.code())) +
                   0.5 * eps * table.delta_at(3, ctx.m)) /
                  d.grad.sum();
  CHECK(f1 == doctest::Approx(expect).epsilon(1e-9));

  // ragged final block is flagged
  BlockInvestor ragged(sol, 5, N);
  CHECK(ragged.ragged_blocks());
  BlockInvestor even(sol, 4, N);
  CHECK_FALSE(even.ragged_blocks());
}

TEST_CASE("block investor stays admissible on the flagship setup") {
  ExpertPanel p = pm_panel(1);
  Payoff g = Payoff::max();
  PdeSolution sol(p, g);
  int N = 256;
  BlockInvestor inv(sol, 4, N);
  GreedyMarket mkt(sol);
  Trajectory traj =
      simulate(p, g, N, Eigen::VectorXd::Zero(2), HistoryState::parse("+"),
               inv, mkt, 17);
  CHECK(traj.investor_clamps == 0);
  double scaled = traj.final_payoff / std::sqrt(static_cast<double>(N));
  CHECK(scaled > 0.3);  // adversary extracts regret at the diffusive scale
  CHECK(scaled < 1.3);
}

TEST_CASE("trajectory csv format") {
  ExpertPanel p = pm_panel(1);
  Payoff g = Payoff::max();
  ExactInvestor inv(p, g);
  RandomMarket mkt;
  Trajectory traj = simulate(p, g, 4, Eigen::VectorXd::Zero(2),
                             HistoryState::parse("+"), inv, mkt, 5);
  std::ostringstream out;
  write_trajectory_csv(traj, 2, out, "deadbeef", 5);
  std::string text = out.str();
  CHECK(text.rfind("day,state,f,b,x_1,x_2,running_payoff\n", 0) == 0);
  CHECK(text.find("# version=") != std::string::npos);
  CHECK(text.find("config_hash=deadbeef") != std::string::npos);
  CHECK(text.find("seed=5") != std::string::npos);
}
