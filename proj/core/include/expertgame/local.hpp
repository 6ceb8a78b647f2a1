#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "expertgame/panel.hpp"

namespace expertgame {

/// Frozen second-order data (X, p) parameterizing the k-step quadratic
/// min-max game: X a symmetric matrix, p a strictly positive direction.
struct HessianContext {
  Eigen::MatrixXd X;
  Eigen::VectorXd p;
  double gamma_p = 0.0;   // min_i p_i
  double opnorm_X = 0.0;  // spectral norm of X

  HessianContext(Eigen::MatrixXd X_in, Eigen::VectorXd p_in);
};

/// Projection of q(m) onto the hyperplane <p, .> = 0:
/// xi(p,m) = q(m) - (<p,q(m)>/<p,1>) 1. Entries lie in [-2,2].
Eigen::VectorXd xi(const Eigen::VectorXd& p, const ExpertPanel& panel,
                   const HistoryState& m);
Eigen::VectorXd xi(const HessianContext& ctx, const ExpertPanel& panel,
                   const HistoryState& m);

/// Weighted sums of (1/2)<X xi(m), xi(m)> over de Bruijn trees:
/// H_0 = 0 and H_k(m) = (1/2)<X xi(m),xi(m)> + (H_{k-1}(m+)+H_{k-1}(m-))/2.
/// All depths 0..k are retained; the block strategy reads interior levels.
class HTable {
 public:
  HTable(int depth, std::vector<std::vector<double>> levels, int d);

  int depth() const { return depth_; }

  double value_at(int level, const HistoryState& m) const {
    return levels_[static_cast<std::size_t>(level)][m.code()];
  }
  /// H_level(m+) - H_level(m-).
  double delta_at(int level, const HistoryState& m) const;

  /// Depth-k table, one entry per state code.
  const std::vector<double>& values() const {
    return levels_[static_cast<std::size_t>(depth_)];
  }
  /// Depth-k deltas, one entry per state code.
  std::vector<double> deltas() const;

 private:
  int depth_;
  int d_;
  std::vector<std::vector<double>> levels_;
};

HTable h_recursive(const HessianContext& ctx, const ExpertPanel& panel, int k);

/// Direct enumeration of the depth-k tree sum rooted at m; equals the
/// recursion at (m, k) and exists as its independent cross-check.
double h_treesum(const HessianContext& ctx, const ExpertPanel& panel,
                 const HistoryState& m, int k);

/// Per-step average once the root is forgotten:
/// 2^-(d+1) * sum_m <X xi(p,m), xi(p,m)>, summed with multiplicity.
double h_limit(const HessianContext& ctx, const ExpertPanel& panel);

/// Exact one-step min-max min_{|f|<=1} max_b { b h1(f) + eps (S(b)+h2(f)) }
/// for strictly decreasing h1 dominating eps |h2'|. The root condition
/// h1(f*) = (eps/2)(S(-1)-S(1)) is solved by bisection; the value is
/// eps h2(f*) + (eps/2)(S(1)+S(-1)). Preconditions are checked on a grid
/// and a failure raises PreconditionViolated naming the failed condition.
struct OneStepResult {
  double f_star = 0.0;
  double value = 0.0;
};
OneStepResult one_step_minmax(const std::function<double(double)>& h1,
                              const std::function<double(double)>& h2,
                              double s_plus, double s_minus, double eps);

/// Nested k-step min-max of the local game, investor on a uniform grid,
/// evaluated exactly by backward induction over (market path, accumulated
/// investor total). Refinement between grid moves keeps the result
/// meaningful when eps is far below the grid scale.
double local_bruteforce(const HessianContext& ctx, const ExpertPanel& panel,
                        const HistoryState& m, int k, double eps,
                        double f_grid, bool refine = true);

/// Value realized by the indifference strategy (running-sum corrected
/// moves) against an exhaustive market walk. Approximate by construction:
/// an upper evaluator used where brute force is out of reach.
double indifference_value(const HessianContext& ctx, const ExpertPanel& panel,
                          const HistoryState& m, int k, double eps);

/// Left-hand gap of the local averaging statement and the bound shape it
/// is regressed against.
struct CellGap {
  double gap = 0.0;           // | L_{k,eps}/k - h_limit |
  double bound_shape = 0.0;   // d/k + |X| kappa  with kappa = k eps / gamma_p
  bool in_regime = false;     // |X| (k+d) eps small against vartheta*gamma_p
  bool brute = false;         // true when the gap used the brute evaluator
};
CellGap cell_gap(const HessianContext& ctx, const ExpertPanel& panel,
                 const HistoryState& m, int k, double eps,
                 double f_grid = 1e-3);

}  // namespace expertgame
