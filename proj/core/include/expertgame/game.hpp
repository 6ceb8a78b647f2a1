#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "expertgame/debruijn.hpp"
#include "expertgame/panel.hpp"
#include "expertgame/payoff.hpp"

namespace expertgame {

/// One instance of the finite prediction game: horizon N, start day ell,
/// start regret x0 and start history m0. Days run 1..N; moves are made on
/// days ell..N-1 and the payoff is collected on day N.
struct GameSpec {
  const ExpertPanel& panel;
  const Payoff& payoff;
  int N = 1;
  int ell = 1;
  Eigen::VectorXd x0;
  HistoryState m0;
};

enum class Engine { automatic, brute, path, lattice };

struct EngineOptions {
  Engine engine = Engine::automatic;
  /// Investor grid for the brute-force engine (spacing of admissible f).
  double f_grid = 1e-3;
  /// Golden-section refinement of the grid minimum for convex payoffs.
  bool refine = true;
  double refine_tol = 1e-8;
  /// The path engine walks 2^(N-ell) leaves; hard depth guard.
  int path_horizon_limit = 26;
  /// The brute-force engine's depth guard.
  int brute_horizon_limit = 6;
  /// Largest dense level the lattice engine may allocate, in cells.
  std::size_t lattice_cell_budget = 80'000'000;
};

/// Exact one-step min-max under the translation property: a and b are the
/// two continuation values at f = 0, and the step value is
/// min_{|f|<=1} max(a - f, b + f), attained at f* = clamp((a-b)/2, -1, 1).
/// Equals (a+b)/2 whenever |a-b| <= 2.
struct StepResult {
  double value = 0.0;
  double f_star = 0.0;
};

inline StepResult g3_step(double a, double b) {
  double f = 0.5 * (a - b);
  if (f > 1.0) f = 1.0;
  if (f < -1.0) f = -1.0;
  return {std::max(a - f, b + f), f};
}

/// V_N(x0, ell; m0). Translation payoffs use the path engine (or the
/// lattice engine for gridded panels and long horizons); other payoffs
/// fall back to the brute-force engine at its grid accuracy.
double value_exact(const GameSpec& spec, const EngineOptions& opts = {});

/// Nested min-max with the investor restricted to a uniform grid of
/// spacing f_grid, evaluated exactly by backward induction over
/// (market path, accumulated investor total). Works for any payoff;
/// accurate to O(Lip(g) * (N-ell) * f_grid), better with refinement.
double value_bruteforce(const GameSpec& spec, double f_grid,
                        const EngineOptions& opts = {});

/// Value and minimizing first move at (x0, ell; m0).
StepResult optimal_move(const GameSpec& spec, const EngineOptions& opts = {});

/// V_N(x0, ell; m0) for every start state at once (lattice engine),
/// indexed by state code. Requires a gridded panel and translation payoff.
std::vector<double> lattice_values(const ExpertPanel& panel,
                                   const Payoff& payoff, int N, int ell,
                                   const Eigen::VectorXd& x0,
                                   const EngineOptions& opts = {});

/// Day index for the rescaled clock: ceil(N*t) with a 1e-12 snap to
/// integers, clamped to the playable range [1, N].
int day_from_time(int N, double t);

enum class Envelope { state, plus, minus };

/// Parabolically rescaled value u_N(x, t; m) = V_N(sqrt(N) x, day(t); m)
/// / sqrt(N); `plus`/`minus` take the max/min over all start states.
double rescaled_value(const ExpertPanel& panel, const Payoff& payoff, int N,
                      const Eigen::VectorXd& x, double t,
                      const HistoryState& m, Envelope which = Envelope::state,
                      const EngineOptions& opts = {});

/// Max absolute k-step dynamic-programming residual over random probes
/// (x, m): |V(x,ell;m) - minmax_k V(x + sum b(q - f 1), ell+k; m^k+1)|,
/// both sides evaluated by the same engine.
double dpp_check(const GameSpec& spec, int k, int probes, std::uint64_t seed,
                 const EngineOptions& opts = {});

}  // namespace expertgame
