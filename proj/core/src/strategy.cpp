#include "expertgame/strategy.hpp"

#include <cmath>
#include <ostream>

#include "expertgame/errors.hpp"
#include "expertgame/io.hpp"

namespace expertgame {

ExactInvestor::ExactInvestor(const ExpertPanel& panel, const Payoff& payoff,
                             EngineOptions opts)
    : panel_(panel), payoff_(payoff), opts_(opts) {}

double ExactInvestor::move(const RoundContext& ctx) {
  GameSpec spec{panel_, payoff_, ctx.N, ctx.day, ctx.x, ctx.m};
  return optimal_move(spec, opts_).f_star;
}

GradientInvestor::GradientInvestor(const PdeSolution& sol, DerivMode mode)
    : sol_(sol), mode_(mode) {}

double GradientInvestor::move(const RoundContext& ctx) {
  double eps = 1.0 / std::sqrt(static_cast<double>(ctx.N));
  double t = static_cast<double>(ctx.day - 1) / ctx.N;
  Derivs d = sol_.derivatives(eps * ctx.x, t, mode_);
  double mass = d.grad.sum();
  if (mass <= 1e-9)
    throw DegenerateGradient("gradient mass vanished in the weighted move");
  double f = d.grad.dot(sol_.panel().q(ctx.m.code())) / mass;
  if (f < -1.0 || f > 1.0) {
    ++clamps_;
    f = std::clamp(f, -1.0, 1.0);
  }
  return f;
}

BlockInvestor::BlockInvestor(const PdeSolution& sol, int k, int N,
                             DerivMode mode)
    : sol_(sol),
      k_(k),
      N_(N),
      mode_(mode),
      eps_(1.0 / std::sqrt(static_cast<double>(N))) {
  if (k < 1) throw Error("block length must be >= 1");
  ragged_ = N % k != 0;
}

void BlockInvestor::start_block(const RoundContext& ctx) {
  block_len_ = std::min(k_, ctx.N - ctx.day);
  if (block_len_ < 1) block_len_ = 1;
  double t = static_cast<double>(ctx.day - 1) / ctx.N;
  Derivs d = sol_.derivatives(eps_ * ctx.x, t, mode_);
  p_ = d.grad;
  X_ = d.hess;
  p_ones_ = p_.sum();
  if (!(p_.minCoeff() > 0.0))
    throw DegenerateGradient("block start gradient is not strictly positive");
  table_.emplace(h_recursive(HessianContext(X_, p_), sol_.panel(), block_len_));
  int n = sol_.panel().n();
  v_ = Eigen::VectorXd::Zero(n);
  xv_ = Eigen::VectorXd::Zero(n);
  x_ones_ = X_ * Eigen::VectorXd::Ones(n);
  pos_ = 1;
}

double BlockInvestor::move(const RoundContext& ctx) {
  if (pos_ == 0) start_block(ctx);
  const Eigen::VectorXd& q = sol_.panel().q(ctx.m.code());
  double numer = p_.dot(q) + eps_ * q.dot(xv_) +
                 0.5 * eps_ * table_->delta_at(block_len_ - pos_, ctx.m);
  double denom = p_ones_ + eps_ * xv_.sum();
  if (std::abs(denom) <= 1e-9)
    throw DegenerateDenominator("block denominator within 1e-9 of zero");
  double f = numer / denom;
  if (f < -1.0 || f > 1.0) {
    ++clamps_;
    f = std::clamp(f, -1.0, 1.0);
  }
  return f;
}

void BlockInvestor::observe(const RoundContext& ctx, double f, Bit b) {
  const Eigen::VectorXd& q = sol_.panel().q(ctx.m.code());
  v_ += sign(b) * (q.array() - f).matrix();
  xv_ += sign(b) * (X_ * q - f * x_ones_);
  ++pos_;
  if (pos_ > block_len_) pos_ = 0;  // next move opens a fresh block
}

ExhaustiveMarket::ExhaustiveMarket(const ExpertPanel& panel,
                                   const Payoff& payoff, EngineOptions opts)
    : panel_(panel), payoff_(payoff), opts_(opts) {}

Bit ExhaustiveMarket::move(const RoundContext& ctx, double f) {
  if (ctx.day >= ctx.N)
    throw HorizonTooLarge("no market move remains on or after day N");
  const Eigen::VectorXd& q = panel_.q(ctx.m.code());
  double best = -std::numeric_limits<double>::infinity();
  Bit pick = Bit::up;
  for (Bit b : {Bit::up, Bit::down}) {  // ties keep the first (+1) branch
    Eigen::VectorXd x_next = ctx.x + sign(b) * (q.array() - f).matrix();
    GameSpec spec{panel_, payoff_, ctx.N, ctx.day + 1, x_next, ctx.m.shift(b)};
    double value = value_exact(spec, opts_);
    if (value > best) {
      best = value;
      pick = b;
    }
  }
  return pick;
}

GreedyMarket::GreedyMarket(const PdeSolution& sol, DerivMode mode)
    : sol_(sol), mode_(mode) {}

Bit GreedyMarket::move(const RoundContext& ctx, double f) {
  double eps = 1.0 / std::sqrt(static_cast<double>(ctx.N));
  double t = static_cast<double>(ctx.day - 1) / ctx.N;
  Derivs d = sol_.derivatives(eps * ctx.x, t, mode_);
  if (d.grad.sum() <= 1e-9)
    throw DegenerateGradient("gradient mass vanished in the greedy market");
  const Eigen::VectorXd& q = sol_.panel().q(ctx.m.code());
  double inner = d.grad.dot((q.array() - f).matrix());
  return inner >= 0.0 ? Bit::up : Bit::down;
}

Bit RandomMarket::move(const RoundContext& ctx, double f) {
  (void)f;
  return (*ctx.rng)() & 1u ? Bit::up : Bit::down;
}

Trajectory simulate(const ExpertPanel& panel, const Payoff& payoff, int N,
                    const Eigen::VectorXd& x0, const HistoryState& m0,
                    Investor& investor, Market& market, std::uint64_t seed,
                    int ell) {
  if (ell < 1 || ell > N) throw Error("simulate needs 1 <= ell <= N");
  std::mt19937_64 rng(seed);
  Trajectory traj;
  Eigen::VectorXd x = x0;
  HistoryState m = m0;
  for (int day = ell; day < N; ++day) {
    RoundContext ctx{day, N, x, m, &rng};
    double f = investor.move(ctx);
    if (!(f >= -1.0 && f <= 1.0))
      throw Error("investor produced an inadmissible move");
    Bit b = market.move(ctx, f);
    investor.observe(ctx, f, b);
    const Eigen::VectorXd& q = panel.q(m.code());
    x += sign(b) * (q.array() - f).matrix();
    HistoryState m_prev = m;
    m = m.shift(b);
    traj.rounds.push_back({day, m_prev, f, b, x, payoff(x)});
  }
  traj.final_payoff = payoff(x);
  traj.investor_clamps = investor.clamp_count();
  traj.ragged_blocks = investor.ragged_blocks();
  return traj;
}

void write_trajectory_csv(const Trajectory& traj, int n, std::ostream& out,
                          const std::string& config_hash, std::uint64_t seed) {
  std::string buf = "day,state,f,b";
  for (int i = 1; i <= n; ++i) buf += ",x_" + std::to_string(i);
  buf += ",running_payoff\n";
  for (const Round& r : traj.rounds) {
    buf += std::to_string(r.day);
    buf += ',';
    buf += r.m.to_string();
    buf += ',';
    append_double(buf, r.f);
    buf += ',';
    buf += std::to_string(sign(r.b));
    for (int i = 0; i < n; ++i) {
      buf += ',';
      append_double(buf, r.x[i]);
    }
    buf += ',';
    append_double(buf, r.running_payoff);
    buf += '\n';
  }
  buf += csv_metadata_line(config_hash, seed);
  buf += '\n';
  out << buf;
}

}  // namespace expertgame
