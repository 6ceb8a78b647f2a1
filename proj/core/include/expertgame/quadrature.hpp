#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace expertgame {

/// Nodes and weights of a classical quadrature rule.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule of the given order (weight exp(-x^2) on R),
/// computed by Golub-Welsch on the Jacobi matrix and cached.
const QuadratureRule& gauss_hermite_rule(int order);

/// Gauss-Legendre rule of the given order on [-1,1], cached.
const QuadratureRule& gauss_legendre_rule(int order);

/// E[f(z)] for z standard normal on R^dim (dim <= 3), computed with
/// adaptive Gauss-Legendre panels nested per dimension. The integrand
/// writes out_dim components; the error is controlled in max norm.
/// Panels keep splitting where the integrand kinks, which is what makes
/// piecewise-linear payoffs integrable to full accuracy.
void expect_normal(const std::function<void(const double* z, double* out)>& f,
                   int dim, int out_dim, double tol, double* out);

inline double expect_normal(const std::function<double(const double* z)>& f,
                            int dim, double tol) {
  double out = 0.0;
  expect_normal([&](const double* z, double* o) { o[0] = f(z); }, dim, 1, tol,
                &out);
  return out;
}

/// Seeded Monte-Carlo estimate of E[f(z)], z standard normal on R^dim,
/// with its standard error. Sampling is deterministic given the seed
/// (explicit Box-Muller on the raw generator output).
struct McResult {
  double value = 0.0;
  double stderr_ = 0.0;
};
McResult mc_expect_normal(const std::function<double(const double* z)>& f,
                          int dim, long long samples, std::uint64_t seed);

}  // namespace expertgame
