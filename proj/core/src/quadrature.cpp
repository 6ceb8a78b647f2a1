#include "expertgame/quadrature.hpp"

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>
#include <random>

#include "expertgame/errors.hpp"

namespace expertgame {

namespace {

QuadratureRule golub_welsch(int order, bool hermite) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(std::max(order - 1, 0));
  for (int i = 1; i < order; ++i) {
    double b = hermite ? std::sqrt(0.5 * i)
                       : i / std::sqrt(4.0 * i * i - 1.0);
    sub[i - 1] = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  QuadratureRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  double mu0 = hermite ? std::sqrt(M_PI) : 2.0;
  for (int i = 0; i < order; ++i) {
    rule.nodes[i] = es.eigenvalues()[i];
    double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

const QuadratureRule& cached_rule(int order, bool hermite) {
  if (order < 1) throw Error("quadrature order must be >= 1");
  static std::mutex mu;
  static std::map<std::pair<int, bool>, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(order, hermite);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, golub_welsch(order, hermite)).first;
  return it->second;
}

// Adaptive panels for integrals against exp(-x^2); |x| <= 8.6 keeps the
// truncated tail below 1e-31 for linear-growth integrands.
constexpr double kHalfWidth = 8.6;
constexpr int kPanelOrder = 12;
constexpr long long kEvalBudget = 200'000'000;

struct AdaptiveCtx {
  const std::function<void(const double* z, double* out)>& f;
  int dim;
  int out_dim;
  std::vector<double> level_tol;  // absolute tolerance per nesting level
  long long evals = 0;
  std::vector<double> z;  // current point, outer dims filled first
};

void integrand_at(AdaptiveCtx& ctx, int level, double x, double* out);

// One Gauss-Legendre pass of nesting level `level` over [a,b] against
// exp(-x^2), accumulating out_dim components.
void gl_panel(AdaptiveCtx& ctx, int level, double a, double b, double* out) {
  const QuadratureRule& gl = gauss_legendre_rule(kPanelOrder);
  int K = ctx.out_dim;
  for (int k = 0; k < K; ++k) out[k] = 0.0;
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  std::vector<double> tmp(static_cast<std::size_t>(K));
  for (int i = 0; i < kPanelOrder; ++i) {
    double x = mid + half * gl.nodes[static_cast<std::size_t>(i)];
    integrand_at(ctx, level, x, tmp.data());
    double w = half * gl.weights[static_cast<std::size_t>(i)] *
               std::exp(-x * x);
    for (int k = 0; k < K; ++k) out[k] += w * tmp[k];
  }
}

// Bisection with the parent estimate reused. Nested levels return values
// that are only accurate to their own tolerance, so comparisons below the
// induced noise floor do not trigger further splitting.
void adaptive_panel(AdaptiveCtx& ctx, int level, double a, double b,
                    const std::vector<double>& whole, double tol, int depth,
                    double* acc) {
  int K = ctx.out_dim;
  std::vector<double> left(static_cast<std::size_t>(K));
  std::vector<double> right(static_cast<std::size_t>(K));
  double mid = 0.5 * (a + b);
  gl_panel(ctx, level, a, mid, left.data());
  gl_panel(ctx, level, mid, b, right.data());
  double err = 0.0;
  for (int k = 0; k < K; ++k)
    err = std::max(err, std::abs(left[k] + right[k] - whole[k]));
  // nested levels return values noisy at their own tolerance; splitting
  // below that floor would chase the noise, not the integrand
  double noise = 0.0;
  if (level + 1 < ctx.dim)
    noise = 50.0 * ctx.level_tol[static_cast<std::size_t>(level) + 1] * (b - a);
  if (err <= std::max(tol, noise) || depth >= 44) {
    for (int k = 0; k < K; ++k) acc[k] += left[k] + right[k];
    return;
  }
  if (ctx.evals > kEvalBudget)
    throw QuadratureNotConverged("adaptive panel budget exhausted");
  adaptive_panel(ctx, level, a, mid, left, 0.5 * tol, depth + 1, acc);
  adaptive_panel(ctx, level, mid, b, right, 0.5 * tol, depth + 1, acc);
}

void integrate_level(AdaptiveCtx& ctx, int level, double* out) {
  int K = ctx.out_dim;
  std::vector<double> whole(static_cast<std::size_t>(K));
  gl_panel(ctx, level, -kHalfWidth, kHalfWidth, whole.data());
  for (int k = 0; k < K; ++k) out[k] = 0.0;
  adaptive_panel(ctx, level, -kHalfWidth, kHalfWidth, whole,
                 ctx.level_tol[static_cast<std::size_t>(level)], 0, out);
  double norm = 1.0 / std::sqrt(M_PI);
  for (int k = 0; k < K; ++k) out[k] *= norm;
}

// Value of the (remaining-dimension) integrand at outer coordinate x.
void integrand_at(AdaptiveCtx& ctx, int level, double x, double* out) {
  ctx.z[static_cast<std::size_t>(level)] = M_SQRT2 * x;  // z = sqrt(2) x
  if (level + 1 == ctx.dim) {
    ++ctx.evals;
    ctx.f(ctx.z.data(), out);
    return;
  }
  integrate_level(ctx, level + 1, out);
}

}  // namespace

const QuadratureRule& gauss_hermite_rule(int order) {
  return cached_rule(order, true);
}

const QuadratureRule& gauss_legendre_rule(int order) {
  return cached_rule(order, false);
}

void expect_normal(const std::function<void(const double* z, double* out)>& f,
                   int dim, int out_dim, double tol, double* out) {
  if (dim < 1 || dim > 3)
    throw Error("adaptive normal expectation supports 1 <= dim <= 3");
  AdaptiveCtx ctx{f, dim, out_dim, {}, 0, {}};
  ctx.level_tol.resize(static_cast<std::size_t>(dim));
  double level_tol = tol;
  for (int l = 0; l < dim; ++l) {
    ctx.level_tol[static_cast<std::size_t>(l)] = std::max(level_tol, 1e-14);
    level_tol *= 1e-3;
  }
  ctx.z.assign(static_cast<std::size_t>(dim), 0.0);
  integrate_level(ctx, 0, out);
}

McResult mc_expect_normal(const std::function<double(const double* z)>& f,
                          int dim, long long samples, std::uint64_t seed) {
  if (samples < 2) throw Error("mc_expect_normal needs samples >= 2");
  std::mt19937_64 rng(seed);
  auto uniform = [&]() {
    // (0,1]: platform-stable mapping of the raw 64-bit draw
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
  };
  std::vector<double> z(static_cast<std::size_t>(dim));
  double mean = 0.0, m2 = 0.0;
  long long count = 0;
  double spare = 0.0;
  bool have_spare = false;
  for (long long s = 0; s < samples; ++s) {
    for (int i = 0; i < dim; ++i) {
      if (have_spare) {
        z[static_cast<std::size_t>(i)] = spare;
        have_spare = false;
      } else {
        double u1 = uniform(), u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        z[static_cast<std::size_t>(i)] = r * std::cos(2.0 * M_PI * u2);
        spare = r * std::sin(2.0 * M_PI * u2);
        have_spare = true;
      }
    }
    double v = f(z.data());
    ++count;
    double d = v - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (v - mean);
  }
  double var = m2 / static_cast<double>(count - 1);
  return {mean, std::sqrt(var / static_cast<double>(count))};
}

}  // namespace expertgame
