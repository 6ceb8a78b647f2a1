#pragma once

// Test-only oracles: slow, literal transcriptions of the defining
// recursions, kept independent of the engines they check.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>

#include "expertgame/debruijn.hpp"
#include "expertgame/panel.hpp"
#include "expertgame/payoff.hpp"

namespace oracle {

// Literal nested min-max over a uniform investor grid; exponential in the
// horizon, usable only for tiny depths and coarse grids.
inline double nested_value(const expertgame::ExpertPanel& panel,
                           const expertgame::Payoff& g, int N, int day,
                           const Eigen::VectorXd& x,
                           const expertgame::HistoryState& m,
                           long long grid_halfcount) {
  if (day == N) return g(x);
  const Eigen::VectorXd& q = panel.q(m.code());
  double best = std::numeric_limits<double>::infinity();
  for (long long fi = -grid_halfcount; fi <= grid_halfcount; ++fi) {
    double f =
        static_cast<double>(fi) / static_cast<double>(grid_halfcount);
    double worst = -std::numeric_limits<double>::infinity();
    for (int b : {+1, -1}) {
      Eigen::VectorXd x_next = x + b * (q.array() - f).matrix();
      worst = std::max(worst, nested_value(panel, g, N, day + 1, x_next,
                                           m.shift(expertgame::bit_from_sign(b)),
                                           grid_halfcount));
    }
    best = std::min(best, worst);
  }
  return best;
}

// One translation-reduced step by exhaustive search over f:
// min_f max(a - f, b + f) on a grid of the given resolution.
inline std::pair<double, double> grid_g3_step(double a, double b,
                                              double f_step) {
  double best_v = std::numeric_limits<double>::infinity();
  double best_f = 0.0;
  for (double f = -1.0; f <= 1.0 + 0.5 * f_step; f += f_step) {
    double fc = std::min(f, 1.0);
    double v = std::max(a - fc, b + fc);
    if (v < best_v) {
      best_v = v;
      best_f = fc;
    }
  }
  return {best_v, best_f};
}

// Literal nested min-max of the quadratic local game (investor on a grid),
// exponential in k.
inline double nested_local(const expertgame::ExpertPanel& panel,
                           const Eigen::MatrixXd& X, const Eigen::VectorXd& p,
                           const expertgame::HistoryState& m, int k,
                           double eps, long long grid_halfcount) {
  struct Walker {
    const expertgame::ExpertPanel& panel;
    const Eigen::MatrixXd& X;
    const Eigen::VectorXd& p;
    double eps;
    int k;
    long long half;

    double go(int i, const expertgame::HistoryState& m,
              const Eigen::VectorXd& w) const {
      if (i == k) return p.dot(w) / eps + 0.5 * w.dot(X * w);
      const Eigen::VectorXd& q = panel.q(m.code());
      double best = std::numeric_limits<double>::infinity();
      for (long long fi = -half; fi <= half; ++fi) {
        double f = static_cast<double>(fi) / static_cast<double>(half);
        double worst = -std::numeric_limits<double>::infinity();
        for (int b : {+1, -1}) {
          Eigen::VectorXd w_next = w + b * (q.array() - f).matrix();
          worst = std::max(
              worst, go(i + 1, m.shift(expertgame::bit_from_sign(b)), w_next));
        }
        best = std::min(best, worst);
      }
      return best;
    }
  };
  Eigen::VectorXd w0 = Eigen::VectorXd::Zero(panel.n());
  return Walker{panel, X, p, eps, k, grid_halfcount}.go(0, m, w0);
}

// Grid min-max of a scalar one-step problem
// min_f max_b { b h1(f) + eps (S(b) + h2(f)) }.
template <class H1, class H2>
double grid_one_step(H1 h1, H2 h2, double s_plus, double s_minus, double eps,
                     double f_step) {
  double best = std::numeric_limits<double>::infinity();
  for (double f = -1.0; f <= 1.0 + 0.5 * f_step; f += f_step) {
    double fc = std::min(f, 1.0);
    double up = h1(fc) + eps * (s_plus + h2(fc));
    double down = -h1(fc) + eps * (s_minus + h2(fc));
    best = std::min(best, std::max(up, down));
  }
  return best;
}

}  // namespace oracle
