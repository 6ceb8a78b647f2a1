#include "expertgame/local.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "expertgame/errors.hpp"

namespace expertgame {

HessianContext::HessianContext(Eigen::MatrixXd X_in, Eigen::VectorXd p_in)
    : X(std::move(X_in)), p(std::move(p_in)) {
  if (X.rows() != X.cols() || X.rows() != p.size())
    throw Error("context needs a square X matching p");
  if ((X - X.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw Error("X must be symmetric");
  if (!(p.minCoeff() > 0.0)) throw Error("p must be strictly positive");
  gamma_p = p.minCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X);
  opnorm_X = es.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::VectorXd xi(const Eigen::VectorXd& p, const ExpertPanel& panel,
                   const HistoryState& m) {
  double mass = p.sum();
  if (mass <= 1e-12)
    throw DegenerateGradient("<p,1> <= 1e-12 in the projection");
  const Eigen::VectorXd& q = panel.q(m.code());
  return q.array() - p.dot(q) / mass;
}

Eigen::VectorXd xi(const HessianContext& ctx, const ExpertPanel& panel,
                   const HistoryState& m) {
  return xi(ctx.p, panel, m);
}

namespace {

// (1/2)<X xi(m), xi(m)> for every state
std::vector<double> half_forms(const HessianContext& ctx,
                               const ExpertPanel& panel) {
  std::vector<double> z(panel.states());
  for (const HistoryState& m : enumerate_states(panel.d())) {
    Eigen::VectorXd v = xi(ctx, panel, m);
    z[m.code()] = 0.5 * v.dot(ctx.X * v);
  }
  return z;
}

}  // namespace

HTable::HTable(int depth, std::vector<std::vector<double>> levels, int d)
    : depth_(depth), d_(d), levels_(std::move(levels)) {}

double HTable::delta_at(int level, const HistoryState& m) const {
  const auto& row = levels_[static_cast<std::size_t>(level)];
  return row[m.plus().code()] - row[m.minus().code()];
}

std::vector<double> HTable::deltas() const {
  std::vector<double> out(levels_[0].size());
  for (const HistoryState& m : enumerate_states(d_))
    out[m.code()] = delta_at(depth_, m);
  return out;
}

HTable h_recursive(const HessianContext& ctx, const ExpertPanel& panel,
                   int k) {
  if (k < 0) throw Error("depth must be nonnegative");
  std::vector<double> zeta = half_forms(ctx, panel);
  std::vector<std::vector<double>> levels(static_cast<std::size_t>(k) + 1);
  levels[0].assign(panel.states(), 0.0);
  for (int j = 1; j <= k; ++j) {
    levels[static_cast<std::size_t>(j)].resize(panel.states());
    const auto& prev = levels[static_cast<std::size_t>(j - 1)];
    for (const HistoryState& m : enumerate_states(panel.d()))
      levels[static_cast<std::size_t>(j)][m.code()] =
          zeta[m.code()] +
          0.5 * (prev[m.plus().code()] + prev[m.minus().code()]);
  }
  return HTable(k, std::move(levels), panel.d());
}

double h_treesum(const HessianContext& ctx, const ExpertPanel& panel,
                 const HistoryState& m, int k) {
  if (k < 1) throw Error("tree sum needs k >= 1");
  if (k > 20) throw DepthTooLarge("tree enumeration supports k <= 20");
  std::vector<double> zeta = half_forms(ctx, panel);
  double total = zeta[m.code()];
  for (int level = 1; level <= k - 1; ++level) {
    double layer = 0.0;
    for (std::uint64_t word = 0; word < (std::uint64_t{1} << level); ++word) {
      HistoryState node = m;
      for (int i = 0; i < level; ++i)
        node = node.shift((word >> i) & 1u ? Bit::up : Bit::down);
      layer += 2.0 * zeta[node.code()];  // <X xi, xi> = 2 * zeta
    }
    total += layer / std::pow(2.0, level + 1);
  }
  return total;
}

double h_limit(const HessianContext& ctx, const ExpertPanel& panel) {
  double total = 0.0;
  // indexed family: coincident projections count with multiplicity
  for (const HistoryState& m : enumerate_states(panel.d())) {
    Eigen::VectorXd v = xi(ctx, panel, m);
    total += v.dot(ctx.X * v);
  }
  return total / std::pow(2.0, panel.d() + 1);
}

OneStepResult one_step_minmax(const std::function<double(double)>& h1,
                              const std::function<double(double)>& h2,
                              double s_plus, double s_minus, double eps) {
  const double target = 0.5 * eps * (s_minus - s_plus);
  if (!(h1(-1.0) > target && target > h1(1.0)))
    throw PreconditionViolated(
        PreconditionViolated::Which::root_bracket,
        "h1(-1), h1(1) fail to bracket the indifference level");
  constexpr double kGrid = 1e-3;
  double prev1 = h1(-1.0), prev2 = h2(-1.0);
  for (double f = -1.0 + kGrid; f <= 1.0 + 0.5 * kGrid; f += kGrid) {
    double c1 = h1(f), c2 = h2(f);
    if (!(c1 - prev1 + eps * std::abs(c2 - prev2) < 0.0))
      throw PreconditionViolated(
          PreconditionViolated::Which::strict_decrease,
          "h1 fails to decrease strictly against eps*|h2'|");
    prev1 = c1;
    prev2 = c2;
  }
  double lo = -1.0, hi = 1.0;  // h1(lo) > target > h1(hi)
  while (hi - lo > 1e-12) {
    double mid = 0.5 * (lo + hi);
    (h1(mid) > target ? lo : hi) = mid;
  }
  double f_star = 0.5 * (lo + hi);
  return {f_star, eps * h2(f_star) + 0.5 * eps * (s_plus + s_minus)};
}

namespace {

double lerp(const std::vector<double>& row, double pos) {
  double fl = std::floor(pos);
  std::size_t i0 = static_cast<std::size_t>(fl);
  if (i0 + 1 >= row.size()) return row.back();
  double t = pos - fl;
  return row[i0] + t * (row[i0 + 1] - row[i0]);
}

}  // namespace

double local_bruteforce(const HessianContext& ctx, const ExpertPanel& panel,
                        const HistoryState& m, int k, double eps,
                        double f_grid, bool refine) {
  if (k < 1 || k > 5)
    throw DepthTooLarge("brute-force local game supports 1 <= k <= 5");
  if (!(f_grid >= 1e-3)) throw Error("f_grid must be >= 1e-3");
  if (!(eps > 0.0)) throw Error("eps must be positive");

  const long long G = std::max<long long>(1, std::llround(1.0 / f_grid));
  const double delta = 1.0 / static_cast<double>(G);
  const int n = panel.n();
  const double lambda = ctx.p.sum() / eps;  // steep slope carried explicitly

  // market paths: node t at level j has children 2t (up) and 2t+1 (down)
  std::vector<std::vector<std::uint32_t>> mcode(static_cast<std::size_t>(k) +
                                                1);
  std::vector<std::vector<Eigen::VectorXd>> v(static_cast<std::size_t>(k) + 1);
  mcode[0] = {m.code()};
  v[0] = {Eigen::VectorXd::Zero(n)};
  for (int j = 0; j < k; ++j) {
    std::size_t count = mcode[j].size();
    mcode[j + 1].resize(2 * count);
    v[j + 1].resize(2 * count);
    for (std::size_t t = 0; t < count; ++t) {
      HistoryState node(panel.d(), mcode[j][t]);
      const Eigen::VectorXd& q = panel.q(node.code());
      mcode[j + 1][2 * t] = node.plus().code();
      v[j + 1][2 * t] = v[j][t] + q;
      mcode[j + 1][2 * t + 1] = node.minus().code();
      v[j + 1][2 * t + 1] = v[j][t] - q;
    }
  }

  auto row_size = [&](int j) { return static_cast<std::size_t>(2 * j * G + 1); };

  // Rows hold T~(c) = T(c) + lambda*c; the steep linear part of the value
  // interpolates exactly, which is what keeps refinement meaningful for
  // eps far below the grid scale.
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const double quad_ones = 0.5 * ones.dot(ctx.X * ones);
  std::vector<std::vector<double>> next(v[k].size());
  for (std::size_t t = 0; t < next.size(); ++t) {
    const Eigen::VectorXd& w = v[k][t];
    double alpha = ctx.p.dot(w) / eps + 0.5 * w.dot(ctx.X * w);
    double beta = -ones.dot(ctx.X * w);  // coefficient of c after the shift
    next[t].resize(row_size(k));
    for (long long ci = -k * G; ci <= k * G; ++ci) {
      double c = static_cast<double>(ci) * delta;
      next[t][static_cast<std::size_t>(ci + k * G)] =
          alpha + beta * c + quad_ones * c * c;
    }
  }

  auto max_slope = [&](const std::vector<std::vector<double>>& rows) {
    double s = 0.0;
    for (const auto& row : rows)
      for (std::size_t i = 0; i + 1 < row.size(); ++i)
        s = std::max(s, std::abs(row[i + 1] - row[i]) / delta);
    return s;
  };

  std::vector<std::vector<double>> cur;
  for (int j = k - 1; j >= 0; --j) {
    // certify the single-crossing structure of this level's children
    const bool bisectable = max_slope(next) < lambda;
    std::size_t count = mcode[j].size();
    cur.assign(count, {});
    for (std::size_t t = 0; t < count; ++t) {
      const std::vector<double>& A = next[2 * t];
      const std::vector<double>& B = next[2 * t + 1];
      std::vector<double>& row = cur[t];
      row.resize(row_size(j));
      const long long child_base = (j + 1) * G;
      for (long long ci = -j * G; ci <= j * G; ++ci) {
        double c = static_cast<double>(ci) * delta;
        // P(f) = A~(c+f) - lambda f  (falls),  Q(f) = B~(c-f) + lambda f
        auto pval = [&](long long fi) {
          return A[static_cast<std::size_t>(ci + fi + child_base)] -
                 lambda * static_cast<double>(fi) * delta;
        };
        auto qval = [&](long long fi) {
          return B[static_cast<std::size_t>(ci - fi + child_base)] +
                 lambda * static_cast<double>(fi) * delta;
        };
        long long best_fi = -G;
        double best;
        if (bisectable) {
          if (pval(-G) - qval(-G) <= 0.0) {
            best_fi = -G;
            best = std::max(pval(-G), qval(-G));
          } else if (pval(G) - qval(G) >= 0.0) {
            best_fi = G;
            best = std::max(pval(G), qval(G));
          } else {
            long long lo = -G, hi = G;
            while (hi - lo > 1) {
              long long mid = lo + (hi - lo) / 2;
              if (pval(mid) - qval(mid) > 0.0)
                lo = mid;
              else
                hi = mid;
            }
            double at_lo = std::max(pval(lo), qval(lo));
            double at_hi = std::max(pval(hi), qval(hi));
            best_fi = at_lo <= at_hi ? lo : hi;
            best = std::min(at_lo, at_hi);
          }
        } else {
          best = std::max(pval(-G), qval(-G));
          for (long long fi = -G + 1; fi <= G; ++fi) {
            double val = std::max(pval(fi), qval(fi));
            if (val < best) {
              best = val;
              best_fi = fi;
            }
          }
        }
        if (refine) {
          double flo =
              std::max(-1.0, static_cast<double>(best_fi - 1) * delta);
          double fhi = std::min(1.0, static_cast<double>(best_fi + 1) * delta);
          auto phi = [&](double f) {
            double pa = (c + f) / delta + static_cast<double>(child_base);
            double pb = (c - f) / delta + static_cast<double>(child_base);
            return std::max(lerp(A, pa) - lambda * f, lerp(B, pb) + lambda * f);
          };
          constexpr double kInvPhi = 0.6180339887498949;
          double x1 = fhi - kInvPhi * (fhi - flo);
          double x2 = flo + kInvPhi * (fhi - flo);
          double p1 = phi(x1), p2 = phi(x2);
          for (int it = 0; it < 90 && fhi - flo > 1e-14; ++it) {
            if (p1 <= p2) {
              fhi = x2;
              x2 = x1;
              p2 = p1;
              x1 = fhi - kInvPhi * (fhi - flo);
              p1 = phi(x1);
            } else {
              flo = x1;
              x1 = x2;
              p1 = p2;
              x2 = flo + kInvPhi * (fhi - flo);
              p2 = phi(x2);
            }
          }
          best = std::min(best, std::min(p1, p2));
        }
        row[static_cast<std::size_t>(ci + j * G)] = best;
      }
    }
    next.swap(cur);
  }
  return next[0][0];  // T(0) = T~(0)
}

namespace {

struct IndiffWalk {
  const HessianContext& ctx;
  const ExpertPanel& panel;
  const HTable& table;
  double eps;
  int k;
  Eigen::VectorXd x_ones;                 // X * 1
  std::vector<Eigen::VectorXd> x_q;       // X * q(m) per state
  double p_ones;

  double walk(int i, const HistoryState& m, const Eigen::VectorXd& w,
              const Eigen::VectorXd& xw) const {
    if (i == k) return ctx.p.dot(w) / eps + 0.5 * w.dot(xw);
    const Eigen::VectorXd& q = panel.q(m.code());
    double numer = ctx.p.dot(q) + eps * q.dot(xw) +
                   0.5 * eps * table.delta_at(k - 1 - i, m);
    double denom = p_ones + eps * xw.sum();
    if (std::abs(denom) <= 1e-9)
      throw DegenerateDenominator("running denominator vanished");
    double f = std::clamp(numer / denom, -1.0, 1.0);
    double worst = -std::numeric_limits<double>::infinity();
    for (Bit b : {Bit::up, Bit::down}) {
      Eigen::VectorXd delta = (q.array() - f).matrix();
      Eigen::VectorXd w2 = w + sign(b) * delta;
      Eigen::VectorXd xw2 = xw + sign(b) * (x_q[m.code()] - f * x_ones);
      worst = std::max(worst, walk(i + 1, m.shift(b), w2, xw2));
    }
    return worst;
  }
};

}  // namespace

double indifference_value(const HessianContext& ctx, const ExpertPanel& panel,
                          const HistoryState& m, int k, double eps) {
  if (k < 1 || k > 22)
    throw DepthTooLarge("indifference walk supports 1 <= k <= 22");
  HTable table = h_recursive(ctx, panel, k);
  IndiffWalk walk{ctx,
                  panel,
                  table,
                  eps,
                  k,
                  ctx.X * Eigen::VectorXd::Ones(panel.n()),
                  {},
                  ctx.p.sum()};
  walk.x_q.reserve(panel.states());
  for (std::size_t s = 0; s < panel.states(); ++s)
    walk.x_q.push_back(ctx.X * panel.q(static_cast<std::uint32_t>(s)));
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(panel.n());
  return walk.walk(0, m, zero, zero);
}

CellGap cell_gap(const HessianContext& ctx, const ExpertPanel& panel,
                 const HistoryState& m, int k, double eps, double f_grid) {
  if (k < panel.d() + 1)
    throw Error("averaging gap needs k >= d + 1");
  CellGap out;
  out.brute = k <= 5;
  double value = out.brute ? local_bruteforce(ctx, panel, m, k, eps, f_grid)
                           : indifference_value(ctx, panel, m, k, eps);
  out.gap = std::abs(value / k - h_limit(ctx, panel));
  out.bound_shape = static_cast<double>(panel.d()) / k +
                    ctx.opnorm_X * k * eps / ctx.gamma_p;
  double vartheta = compute_vartheta(panel);
  out.in_regime =
      ctx.opnorm_X * (k + panel.d()) * eps <= 0.1 * vartheta * ctx.gamma_p;
  return out;
}

}  // namespace expertgame
