#include "expertgame/pde.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "expertgame/errors.hpp"
#include "expertgame/local.hpp"

namespace expertgame {

CoordinateMap::CoordinateMap(int n_in) : n(n_in) {
  if (n < 2) throw Error("coordinate map needs n >= 2");
  R = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n - 1; ++i) {
    R(i, i) = 1.0;
    R(i, n - 1) = -1.0;
  }
  R.row(n - 1).setOnes();
  Rinv = Eigen::MatrixXd::Zero(n, n);
  double inv_n = 1.0 / n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n - 1; ++j)
      Rinv(i, j) = (i == j ? 1.0 : 0.0) - inv_n;
    Rinv(i, n - 1) = inv_n;
  }
}

Eigen::VectorXd CoordinateMap::differences(const Eigen::VectorXd& x) const {
  return x.head(n - 1).array() - x[n - 1];
}

double heat_kernel(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                   double t) {
  if (!(t > 0.0)) throw Error("heat kernel needs t > 0");
  const int m = static_cast<int>(y.size());
  if (A.rows() != m || A.cols() != m)
    throw Error("kernel matrix must match the dimension of y");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.eigenvalues().minCoeff() <= 1e-12)
    throw SingularDiffusion("diffusion matrix is numerically singular");
  double det = es.eigenvalues().prod();
  Eigen::VectorXd w = es.eigenvectors().transpose() * y;
  double quad = (w.array().square() / es.eigenvalues().array()).sum();
  return std::exp(-quad / (4.0 * t)) /
         (std::pow(4.0 * M_PI * t, 0.5 * m) * std::sqrt(det));
}

PdeSolution::PdeSolution(ExpertPanel panel, Payoff payoff,
                         QuadratureOptions opts)
    : panel_(std::move(panel)),
      payoff_(std::move(payoff)),
      opts_(opts),
      diag_(diagnose(panel_)),
      map_(panel_.n()) {
  if (!payoff_.flags().g3)
    throw Error("the convolution solver requires a translation payoff");
  if (diag_.lambda_min_A <= 1e-12)
    throw SingularDiffusion(
        "reduced diffusion is singular (smallest eigenvalue of A <= 1e-12)");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(diag_.A);
  Eigen::VectorXd sqrt_ev = es.eigenvalues().cwiseSqrt();
  A_sqrt_ = es.eigenvectors() * sqrt_ev.asDiagonal() *
            es.eigenvectors().transpose();
  A_sqrt_inv_ = es.eigenvectors() * sqrt_ev.cwiseInverse().asDiagonal() *
                es.eigenvectors().transpose();
  b_cols_ = map_.Rinv.leftCols(panel_.n() - 1);
  proj_ = Eigen::MatrixXd::Zero(panel_.n() - 1, panel_.n());
  for (int i = 0; i < panel_.n() - 1; ++i) {
    proj_(i, i) = 1.0;
    proj_(i, panel_.n() - 1) = -1.0;
  }
}

double PdeSolution::gbar(const Eigen::VectorXd& y) const {
  return payoff_(b_cols_ * y);
}

double PdeSolution::tensor_h(const Eigen::VectorXd& y, double t) const {
  const int m = panel_.n() - 1;
  // argument scale: y + 2 sqrt(1-t) A^(1/2) x with x the Hermite node
  Eigen::MatrixXd scale = 2.0 * std::sqrt(1.0 - t) * A_sqrt_;
  double prev = 0.0;
  bool have_prev = false;
  for (int order = opts_.gh_order; order <= opts_.gh_max_order; order *= 2) {
    const QuadratureRule& rule = gauss_hermite_rule(order);
    double total = 0.0;
    std::vector<int> idx(static_cast<std::size_t>(m), 0);
    Eigen::VectorXd node(m);
    bool done = false;
    while (!done) {
      double w = 1.0;
      for (int i = 0; i < m; ++i) {
        node[i] = rule.nodes[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
        w *= rule.weights[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
      }
      total += w * gbar(y + scale * node);
      int k = 0;
      while (k < m && ++idx[static_cast<std::size_t>(k)] == order) {
        idx[static_cast<std::size_t>(k)] = 0;
        ++k;
      }
      done = k == m;
    }
    total /= std::pow(M_PI, 0.5 * m);
    if (have_prev && std::abs(total - prev) <= opts_.tol) return total;
    prev = total;
    have_prev = true;
  }
  throw QuadratureNotConverged(
      "tensor rule failed to stabilize; the adaptive method handles kinked "
      "payoffs");
}

double PdeSolution::h(const Eigen::VectorXd& y, double t,
                      double* stderr_out) const {
  if (stderr_out) *stderr_out = 0.0;
  if (!(t >= 0.0 && t <= 1.0)) throw Error("time must lie in [0,1]");
  if (y.size() != panel_.n() - 1) throw Error("h takes an (n-1)-vector");
  if (t == 1.0) return gbar(y);
  const int m = panel_.n() - 1;
  // standard-normal factor: argument y + S z with S S^T = 2(1-t) A
  Eigen::MatrixXd S = std::sqrt(2.0 * (1.0 - t)) * A_sqrt_;
  if (m >= 4 || opts_.method == QuadratureOptions::Method::monte_carlo) {
    Eigen::VectorXd zv(m);
    McResult r = mc_expect_normal(
        [&](const double* z) {
          for (int i = 0; i < m; ++i) zv[i] = z[i];
          return gbar(y + S * zv);
        },
        m, opts_.mc_samples, opts_.mc_seed);
    if (stderr_out) *stderr_out = r.stderr_;
    return r.value;
  }
  if (opts_.method == QuadratureOptions::Method::tensor_hermite)
    return tensor_h(y, t);
  Eigen::VectorXd zv(m);
  return expect_normal(
      [&](const double* z) {
        for (int i = 0; i < m; ++i) zv[i] = z[i];
        return gbar(y + S * zv);
      },
      m, opts_.tol);
}

double PdeSolution::u(const Eigen::VectorXd& x, double t) const {
  if (x.size() != panel_.n()) throw Error("u takes an n-vector");
  if (t == 1.0) return payoff_(x);  // terminal condition, exact
  return h(map_.differences(x), t) + x.mean();
}

Derivs PdeSolution::derivatives(const Eigen::VectorXd& x, double t,
                                DerivMode mode) const {
  if (!(t >= 0.0 && t < 1.0))
    throw Error("derivatives are defined for t in [0,1)");
  const int n = panel_.n();
  const int m = n - 1;
  Derivs out;
  out.grad.resize(n);
  out.hess.resize(n, n);

  if (mode == DerivMode::central_diff) {
    // Differences are taken on the reduced solution h and assembled with
    // the chain rule, so <grad,1> = 1 and hess*1 = 0 hold identically.
    // The underlying quadrature runs at a tightened tolerance: second
    // differences divide by s^2 and would amplify evaluation noise.
    PdeSolution tight = *this;
    tight.opts_.tol = std::min(opts_.tol, 1e-12);
    Eigen::VectorXd y = map_.differences(x);
    double s = 1e-4 * (1.0 + y.cwiseAbs().maxCoeff());
    double st = std::min(1e-4, 0.25 * (1.0 - t));
    double h0 = tight.h(y, t);
    out.u = h0 + x.mean();
    Eigen::VectorXd grad_y(m);
    Eigen::MatrixXd hess_y(m, m);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < m; ++i) {
      e[i] = s;
      double up = tight.h(y + e, t), down = tight.h(y - e, t);
      grad_y[i] = (up - down) / (2.0 * s);
      hess_y(i, i) = (up - 2.0 * h0 + down) / (s * s);
      e[i] = 0.0;
    }
    Eigen::VectorXd ei = Eigen::VectorXd::Zero(m), ej = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        ei[i] = s;
        ej[j] = s;
        double v = (tight.h(y + ei + ej, t) - tight.h(y + ei - ej, t) -
                    tight.h(y - ei + ej, t) + tight.h(y - ei - ej, t)) /
                   (4.0 * s * s);
        hess_y(i, j) = v;
        hess_y(j, i) = v;
        ei[i] = 0.0;
        ej[j] = 0.0;
      }
    if (t >= st) {
      out.ut = (tight.h(y, t + st) - tight.h(y, t - st)) / (2.0 * st);
    } else {
      // second-order one-sided stencil keeps t inside [0,1]
      out.ut = (-3.0 * h0 + 4.0 * tight.h(y, t + st) -
                tight.h(y, t + 2.0 * st)) /
               (2.0 * st);
    }
    out.grad = proj_.transpose() * grad_y;
    out.grad.array() += 1.0 / n;
    out.hess = proj_.transpose() * hess_y * proj_;
    return out;
  }

  // Differentiated representation. With G = S z (z standard normal):
  //   grad_y h = E[grad gbar(y + G)]
  //   hess_y h = E[gbar(y + G) Sinv (z z^T - I) Sinv]
  //   h_t      = -E[gbar(y + G) (|z|^2 - m)] / (2 (1-t))
  // The score forms move the derivatives onto the Gaussian, which is what
  // keeps them meaningful for kinked payoffs.
  if (m > 3)
    throw Error("quadrature derivatives support up to three reduced dims");
  const double c = 2.0 * (1.0 - t);
  Eigen::MatrixXd S = std::sqrt(c) * A_sqrt_;
  Eigen::MatrixXd Sinv = A_sqrt_inv_ / std::sqrt(c);
  Eigen::VectorXd y = map_.differences(x);
  const int n_out = 1 + m + m * (m + 1) / 2 + 1;
  Eigen::VectorXd acc(n_out);
  Eigen::VectorXd zv(m), arg(m), xv(n), gg(m);
  Eigen::MatrixXd M(m, m);
  expect_normal(
      [&](const double* z, double* o) {
        for (int i = 0; i < m; ++i) zv[i] = z[i];
        arg = y + S * zv;
        xv = b_cols_ * arg;
        double val = payoff_(xv);
        o[0] = val;
        gg = b_cols_.transpose() * payoff_.gradient(xv);
        for (int i = 0; i < m; ++i) o[1 + i] = gg[i];
        M = Sinv * (zv * zv.transpose() - Eigen::MatrixXd::Identity(m, m)) *
            Sinv;
        int k = 1 + m;
        for (int i = 0; i < m; ++i)
          for (int j = i; j < m; ++j) o[k++] = val * M(i, j);
        o[k] = val * (zv.squaredNorm() - m);
      },
      m, n_out, opts_.tol, acc.data());

  out.u = acc[0] + x.mean();
  Eigen::VectorXd grad_y = acc.segment(1, m);
  Eigen::MatrixXd hess_y(m, m);
  {
    int k = 1 + m;
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        hess_y(i, j) = acc[k];
        hess_y(j, i) = acc[k];
        ++k;
      }
    out.ut = -acc[k] / c;
  }
  // chain rule through y = P x and the mean term; these make
  // <grad,1> = 1 and hess * 1 = 0 hold exactly by construction
  out.grad = proj_.transpose() * grad_y;
  out.grad.array() += 1.0 / n;
  out.hess = proj_.transpose() * hess_y * proj_;
  return out;
}

double operator_residual(const Derivs& d, const ExpertPanel& panel) {
  if (d.grad.sum() <= 1e-9)
    throw DegenerateGradient("projection family undefined for <p,1> <= 1e-9");
  double acc = 0.0;
  for (const HistoryState& m : enumerate_states(panel.d())) {
    Eigen::VectorXd v = xi(d.grad, panel, m);
    acc += v.dot(d.hess * v);
  }
  return d.ut + acc / std::pow(2.0, panel.d() + 1);
}

double linear_heat_residual(const Derivs& d, const ExpertPanel& panel) {
  double acc = 0.0;
  for (std::size_t c = 0; c < panel.states(); ++c) {
    const Eigen::VectorXd& q = panel.q(static_cast<std::uint32_t>(c));
    acc += q.dot(d.hess * q);
  }
  return d.ut + acc / std::pow(2.0, panel.d() + 1);
}

double operator_residual(const PdeSolution& sol, const Eigen::VectorXd& x,
                         double t, DerivMode mode) {
  return operator_residual(sol.derivatives(x, t, mode), sol.panel());
}

}  // namespace expertgame
