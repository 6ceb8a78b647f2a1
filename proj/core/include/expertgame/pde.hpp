#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "expertgame/panel.hpp"
#include "expertgame/payoff.hpp"
#include "expertgame/quadrature.hpp"

namespace expertgame {

/// Linear change of coordinates y = R x separating the regret differences
/// y_i = x_i - x_n (i < n) from the mass coordinate y_n = x_1 + ... + x_n.
struct CoordinateMap {
  explicit CoordinateMap(int n);

  int n;
  Eigen::MatrixXd R;
  Eigen::MatrixXd Rinv;

  /// First n-1 rows of R applied to x: the difference coordinates.
  Eigen::VectorXd differences(const Eigen::VectorXd& x) const;
};

/// Anisotropic Gaussian kernel with covariance 2tA in the ambient
/// dimension of y; integrates to one over that dimension.
double heat_kernel(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                   double t);

struct QuadratureOptions {
  enum class Method {
    adaptive,        // nested Gauss-Legendre panels; robust to payoff kinks
    tensor_hermite,  // classical tensor rule; fast for smooth payoffs only
    monte_carlo,     // forced for dimensions >= 4
  };
  Method method = Method::adaptive;
  double tol = 1e-8;
  int gh_order = 64;        // tensor rule start order
  int gh_max_order = 1024;  // doubling cap before QuadratureNotConverged
  long long mc_samples = 1'000'000;
  std::uint64_t mc_seed = 20240801;
};

enum class DerivMode {
  central_diff,  // finite differences of u (relative step 1e-4)
  quadrature,    // differentiate the representation under the integral
};

struct Derivs {
  double u = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  double ut = 0.0;
};

/// Evaluator for the continuum value built from the convolution
/// representation: u(x,t) = h(x_1-x_n,...,x_{n-1}-x_n, t) + mean(x) with
/// h solving the reduced constant-coefficient heat equation with
/// diffusion A and terminal data gbar(y) = g(Rinv (y,0)).
///
/// Requires a translation payoff and a nondegenerate A. Defined for
/// t in [0,1]; at t = 1 the payoff is returned exactly.
class PdeSolution {
 public:
  PdeSolution(ExpertPanel panel, Payoff payoff, QuadratureOptions opts = {});

  double u(const Eigen::VectorXd& x, double t) const;

  /// Reduced solution h(y,t), y of dimension n-1. For dimensions >= 4 the
  /// value is a Monte-Carlo estimate and *stderr_out (when given) receives
  /// its standard error; it is set to 0 for the deterministic paths.
  double h(const Eigen::VectorXd& y, double t,
           double* stderr_out = nullptr) const;

  /// Terminal slice g(Rinv (y,0)).
  double gbar(const Eigen::VectorXd& y) const;

  Derivs derivatives(const Eigen::VectorXd& x, double t,
                     DerivMode mode = DerivMode::central_diff) const;

  const ExpertPanel& panel() const { return panel_; }
  const Payoff& payoff() const { return payoff_; }
  const PanelDiagnostics& diagnostics() const { return diag_; }
  const CoordinateMap& map() const { return map_; }
  const QuadratureOptions& options() const { return opts_; }

 private:
  ExpertPanel panel_;
  Payoff payoff_;
  QuadratureOptions opts_;
  PanelDiagnostics diag_;
  CoordinateMap map_;
  Eigen::MatrixXd A_sqrt_;      // symmetric square root of A
  Eigen::MatrixXd A_sqrt_inv_;
  Eigen::MatrixXd b_cols_;      // Rinv restricted to the difference block
  Eigen::MatrixXd proj_;        // P with y = P x, (n-1) x n

  double tensor_h(const Eigen::VectorXd& y, double t) const;
};

/// phi_t + 2^-(d+1) sum_m <H xi(p,m), xi(p,m)> for p = grad, H = hess.
/// Degenerate gradients (<p,1> <= 1e-9) raise instead of defaulting to an
/// empty sum.
double operator_residual(const Derivs& d, const ExpertPanel& panel);

/// Same operator with the projections replaced by the raw predictions;
/// coincides with operator_residual whenever hess annihilates the ones
/// vector.
double linear_heat_residual(const Derivs& d, const ExpertPanel& panel);

/// Convenience: residual of the solution's own derivatives at (x,t).
double operator_residual(const PdeSolution& sol, const Eigen::VectorXd& x,
                         double t, DerivMode mode = DerivMode::quadrature);

}  // namespace expertgame
