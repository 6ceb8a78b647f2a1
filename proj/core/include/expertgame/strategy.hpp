#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

#include "expertgame/game.hpp"
#include "expertgame/local.hpp"
#include "expertgame/pde.hpp"

namespace expertgame {

/// Everything a strategy may look at before moving on a given day.
struct RoundContext {
  int day = 1;  // move day, ell <= day <= N-1
  int N = 1;
  const Eigen::VectorXd& x;
  HistoryState m;
  std::mt19937_64* rng = nullptr;  // owned by the simulation
};

class Investor {
 public:
  virtual ~Investor() = default;
  /// Chosen investment, guaranteed to lie in [-1,1].
  virtual double move(const RoundContext& ctx) = 0;
  /// Called after the market reveals its move.
  virtual void observe(const RoundContext& ctx, double f, Bit b) {
    (void)ctx, (void)f, (void)b;
  }
  /// How often the raw strategy left [-1,1] and was clamped.
  virtual int clamp_count() const { return 0; }
  virtual bool ragged_blocks() const { return false; }
};

class Market {
 public:
  virtual ~Market() = default;
  virtual Bit move(const RoundContext& ctx, double f) = 0;
};

/// Plays the minimizing move of the value recursion each round.
class ExactInvestor : public Investor {
 public:
  ExactInvestor(const ExpertPanel& panel, const Payoff& payoff,
                EngineOptions opts = {});
  double move(const RoundContext& ctx) override;

 private:
  const ExpertPanel& panel_;
  const Payoff& payoff_;
  EngineOptions opts_;
};

/// Weighted average of the expert predictions by the partial derivatives
/// of the continuum value: f = <grad u, q(m)> / <grad u, 1>, clamped.
class GradientInvestor : public Investor {
 public:
  explicit GradientInvestor(const PdeSolution& sol,
                            DerivMode mode = DerivMode::quadrature);
  double move(const RoundContext& ctx) override;
  int clamp_count() const override { return clamps_; }

 private:
  const PdeSolution& sol_;
  DerivMode mode_;
  int clamps_ = 0;
};

/// Block strategy: freeze p = grad u and X = hess u at the block start,
/// then play the indifference move with running second-order corrections
/// and the tree-sum delta term. Blocks have length k from the start day;
/// a final ragged block reuses the recipe at reduced depth and is flagged.
class BlockInvestor : public Investor {
 public:
  BlockInvestor(const PdeSolution& sol, int k, int N,
                DerivMode mode = DerivMode::quadrature);
  double move(const RoundContext& ctx) override;
  void observe(const RoundContext& ctx, double f, Bit b) override;
  int clamp_count() const override { return clamps_; }
  bool ragged_blocks() const override { return ragged_; }

 private:
  void start_block(const RoundContext& ctx);

  const PdeSolution& sol_;
  int k_;
  int N_;
  DerivMode mode_;
  double eps_;
  int clamps_ = 0;
  bool ragged_ = false;

  // frozen per block
  int block_len_ = 0;
  int pos_ = 0;  // 0 = no active block; else 1-based move index in block
  Eigen::VectorXd p_;
  Eigen::MatrixXd X_;
  double p_ones_ = 0.0;
  std::optional<HTable> table_;
  Eigen::VectorXd v_;       // sum of b_j (q(m^j) - f_j 1) within the block
  Eigen::VectorXd xv_;      // X v
  Eigen::VectorXd x_ones_;  // X 1
};

/// Evaluates both continuations with the value engine and picks the
/// worse one for the investor; ties go to +1. Playing the exact investor
/// against this market reproduces the game value.
class ExhaustiveMarket : public Market {
 public:
  ExhaustiveMarket(const ExpertPanel& panel, const Payoff& payoff,
                   EngineOptions opts = {});
  Bit move(const RoundContext& ctx, double f) override;

 private:
  const ExpertPanel& panel_;
  const Payoff& payoff_;
  EngineOptions opts_;
};

/// First-order adversary: b = sign(<grad u, q(m) - f 1>), zero to +1.
class GreedyMarket : public Market {
 public:
  explicit GreedyMarket(const PdeSolution& sol,
                        DerivMode mode = DerivMode::quadrature);
  Bit move(const RoundContext& ctx, double f) override;

 private:
  const PdeSolution& sol_;
  DerivMode mode_;
};

/// Fair coin from the simulation's generator, consumed in round order.
class RandomMarket : public Market {
 public:
  Bit move(const RoundContext& ctx, double f) override;
};

struct Round {
  int day = 0;
  HistoryState m;
  double f = 0.0;
  Bit b = Bit::up;
  Eigen::VectorXd x;  // regret after the round
  double running_payoff = 0.0;
};

struct Trajectory {
  std::vector<Round> rounds;  // one per move day, ell .. N-1
  double final_payoff = 0.0;
  int investor_clamps = 0;
  bool ragged_blocks = false;
};

/// Round loop from day ell to N-1: the investor moves, the market
/// answers, the regret updates by b (q(m) - f 1) and the history shifts.
/// Deterministic given the seed.
Trajectory simulate(const ExpertPanel& panel, const Payoff& payoff, int N,
                    const Eigen::VectorXd& x0, const HistoryState& m0,
                    Investor& investor, Market& market, std::uint64_t seed,
                    int ell = 1);

/// Columns: day,state,f,b,x_1..x_n,running_payoff; a metadata comment
/// line with version, config hash and seed closes the file.
void write_trajectory_csv(const Trajectory& traj, int n, std::ostream& out,
                          const std::string& config_hash, std::uint64_t seed);

}  // namespace expertgame
