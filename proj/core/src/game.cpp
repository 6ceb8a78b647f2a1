#include "expertgame/game.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <random>

#include "expertgame/errors.hpp"

namespace expertgame {

namespace {

// ---------------------------------------------------------------------------
// Gridded representation shared by the path and lattice engines.
//
// For a panel on the 1/D grid and a translation payoff, a game position is
// (day, state, o) where o holds the first n-1 coordinates of the accumulated
// regret increment, reduced so its last coordinate is zero, in integer 1/D
// units. The reduction is exact: subtracting c*1 from the regret subtracts c
// from the value, so the all-ones component is carried algebraically through
// the recursion instead of being stored.
// ---------------------------------------------------------------------------

struct GridCtx {
  const ExpertPanel& panel;
  const Payoff& payoff;
  Eigen::VectorXd x0;
  int N;
  int D;
  int n;
  // per state: D*(q_i(m) - q_n(m)) for i < n-1, exact integers
  std::vector<std::vector<long long>> rint;
  std::vector<double> qn;
};

GridCtx make_grid_ctx(const GameSpec& spec) {
  const ExpertPanel& panel = spec.panel;
  GridCtx ctx{panel, spec.payoff, spec.x0, spec.N, panel.denom(),
              panel.n(),  {},         {}};
  ctx.rint.resize(panel.states());
  ctx.qn.resize(panel.states());
  for (std::size_t c = 0; c < panel.states(); ++c) {
    const Eigen::VectorXd& q = panel.q(static_cast<std::uint32_t>(c));
    ctx.qn[c] = q[ctx.n - 1];
    ctx.rint[c].resize(ctx.n - 1);
    for (int i = 0; i < ctx.n - 1; ++i)
      ctx.rint[c][i] =
          std::llround((q[i] - q[ctx.n - 1]) * static_cast<double>(ctx.D));
  }
  return ctx;
}

double grid_leaf(const GridCtx& ctx, const long long* o,
                 Eigen::VectorXd& scratch) {
  for (int i = 0; i < ctx.n - 1; ++i)
    scratch[i] = ctx.x0[i] + static_cast<double>(o[i]) / ctx.D;
  scratch[ctx.n - 1] = ctx.x0[ctx.n - 1];
  return ctx.payoff(scratch);
}

double path_grid_value(const GridCtx& ctx, int day, std::uint32_t mcode,
                       std::vector<long long>& o, Eigen::VectorXd& scratch) {
  if (day == ctx.N) return grid_leaf(ctx, o.data(), scratch);
  HistoryState m(ctx.panel.d(), mcode);
  const auto& r = ctx.rint[mcode];
  for (int i = 0; i < ctx.n - 1; ++i) o[i] += r[i];
  double a = path_grid_value(ctx, day + 1, m.plus().code(), o, scratch) +
             ctx.qn[mcode];
  for (int i = 0; i < ctx.n - 1; ++i) o[i] -= 2 * r[i];
  double b = path_grid_value(ctx, day + 1, m.minus().code(), o, scratch) -
             ctx.qn[mcode];
  for (int i = 0; i < ctx.n - 1; ++i) o[i] += r[i];
  return g3_step(a, b).value;
}

// Raw-coordinate path recursion for ungridded panels (translation payoffs).
// x is passed by value: in-place add/subtract would not restore it exactly.
double path_raw_value(const GameSpec& spec, int day, std::uint32_t mcode,
                      const Eigen::VectorXd& x) {
  if (day == spec.N) return spec.payoff(x);
  HistoryState m(spec.panel.d(), mcode);
  const Eigen::VectorXd& q = spec.panel.q(mcode);
  double a = path_raw_value(spec, day + 1, m.plus().code(), x + q);
  double b = path_raw_value(spec, day + 1, m.minus().code(), x - q);
  return g3_step(a, b).value;
}

double path_value(const GameSpec& spec, const EngineOptions& opts) {
  int depth = spec.N - spec.ell;
  if (depth > opts.path_horizon_limit)
    throw HorizonTooLarge("path engine: horizon " + std::to_string(depth) +
                          " exceeds limit " +
                          std::to_string(opts.path_horizon_limit));
  if (spec.panel.has_grid()) {
    GridCtx ctx = make_grid_ctx(spec);
    if (depth >= 18) {
      // fan the two root branches out to parallel workers
      const auto& r = ctx.rint[spec.m0.code()];
      auto run = [&](Bit b) {
        std::vector<long long> o(static_cast<std::size_t>(ctx.n - 1), 0);
        for (int i = 0; i < ctx.n - 1; ++i)
          o[i] = sign(b) * r[i];
        Eigen::VectorXd scratch(ctx.n);
        return path_grid_value(ctx, spec.ell + 1, spec.m0.shift(b).code(), o,
                               scratch);
      };
      auto fut = std::async(std::launch::async, run, Bit::up);
      double b = run(Bit::down) - ctx.qn[spec.m0.code()];
      double a = fut.get() + ctx.qn[spec.m0.code()];
      return g3_step(a, b).value;
    }
    std::vector<long long> o(static_cast<std::size_t>(ctx.n - 1), 0);
    Eigen::VectorXd scratch(ctx.n);
    return path_grid_value(ctx, spec.ell, spec.m0.code(), o, scratch);
  }
  return path_raw_value(spec, spec.ell, spec.m0.code(), spec.x0);
}

// ---------------------------------------------------------------------------
// Lattice engine: dense per-day tables over the reachable offset box.
//
// Offsets of coordinate i move by +-rint[m][i] per day, so they stay on the
// sublattice generated by gcd_i; a table row at j days before the horizon
// needs only |o_i| <= j * max_step_i cells per coordinate. Two day-tables are
// alive at a time, which is what makes horizons in the thousands cheap.
// Values at equal (day, state, offset) keys match the path engine bit for
// bit: both run the identical per-node arithmetic.
// ---------------------------------------------------------------------------

struct LatticePlan {
  std::vector<int> unit;             // gcd per active coordinate
  std::vector<long long> max_step;   // max |step| in units, per active coord
  std::vector<std::vector<long long>> steps;  // per state, per active coord
  std::vector<int> coord;            // original coordinate of each active dim
};

LatticePlan make_lattice_plan(const GridCtx& ctx) {
  LatticePlan plan;
  int m1 = ctx.n - 1;
  for (int i = 0; i < m1; ++i) {
    long long g = 0;
    for (const auto& r : ctx.rint) g = std::gcd(g, std::abs(r[i]));
    if (g == 0) continue;  // coordinate never moves; drop the dimension
    plan.coord.push_back(i);
    plan.unit.push_back(static_cast<int>(g));
  }
  std::size_t dims = plan.coord.size();
  plan.max_step.assign(dims, 0);
  plan.steps.resize(ctx.rint.size());
  for (std::size_t s = 0; s < ctx.rint.size(); ++s) {
    plan.steps[s].resize(dims);
    for (std::size_t k = 0; k < dims; ++k) {
      long long u = ctx.rint[s][plan.coord[k]] / plan.unit[k];
      plan.steps[s][k] = u;
      plan.max_step[k] = std::max(plan.max_step[k], std::abs(u));
    }
  }
  return plan;
}

std::size_t level_cells(const LatticePlan& plan, long long j, int d,
                        std::size_t budget) {
  double total = std::ldexp(1.0, d);
  for (std::size_t k = 0; k < plan.coord.size(); ++k)
    total *= static_cast<double>(2 * j * plan.max_step[k] + 1);
  if (total > static_cast<double>(budget))
    throw HorizonTooLarge("lattice engine: level of " + std::to_string(total) +
                          " cells exceeds budget");
  return static_cast<std::size_t>(total);
}

std::vector<double> lattice_values_impl(const GameSpec& spec,
                                        const EngineOptions& opts) {
  GridCtx ctx = make_grid_ctx(spec);
  LatticePlan plan = make_lattice_plan(ctx);
  const int d = ctx.panel.d();
  const std::size_t nstates = ctx.panel.states();
  const std::size_t dims = plan.coord.size();
  const long long J = spec.N - spec.ell;
  level_cells(plan, J, d, opts.lattice_cell_budget);

  auto dim_size = [&](long long j, std::size_t k) {
    return static_cast<std::size_t>(2 * j * plan.max_step[k] + 1);
  };
  auto level_size = [&](long long j) {
    std::size_t t = 1;
    for (std::size_t k = 0; k < dims; ++k) t *= dim_size(j, k);
    return t;
  };

  // terminal day: leaf payoff over the depth-J box (independent of m)
  std::vector<double> next(nstates * level_size(J));
  {
    Eigen::VectorXd scratch(ctx.n);
    std::vector<long long> idx(dims, 0);
    std::vector<long long> raw(static_cast<std::size_t>(ctx.n - 1), 0);
    std::size_t per_state = level_size(J);
    for (std::size_t cell = 0; cell < per_state; ++cell) {
      std::size_t rem = cell;
      for (std::size_t k = dims; k-- > 0;) {
        std::size_t sz = dim_size(J, k);
        idx[k] = static_cast<long long>(rem % sz);
        rem /= sz;
      }
      for (std::size_t k = 0; k < dims; ++k)
        raw[static_cast<std::size_t>(plan.coord[k])] =
            (idx[k] - J * plan.max_step[k]) * plan.unit[k];
      double v = grid_leaf(ctx, raw.data(), scratch);
      for (std::size_t s = 0; s < nstates; ++s) next[s * per_state + cell] = v;
    }
  }

  std::vector<double> cur;
  for (long long j = J - 1; j >= 0; --j) {
    std::size_t per_state = level_size(j);
    std::size_t per_state_next = level_size(j + 1);
    cur.assign(nstates * per_state, 0.0);
    std::vector<long long> idx(dims, 0);
    for (std::size_t s = 0; s < nstates; ++s) {
      HistoryState m(d, static_cast<std::uint32_t>(s));
      std::size_t up = m.plus().code();
      std::size_t down = m.minus().code();
      const auto& st = plan.steps[s];
      double qn = ctx.qn[s];
      for (std::size_t cell = 0; cell < per_state; ++cell) {
        std::size_t rem = cell;
        for (std::size_t k = dims; k-- > 0;) {
          std::size_t sz = dim_size(j, k);
          idx[k] = static_cast<long long>(rem % sz);
          rem /= sz;
        }
        // child cell indices in the (j+1)-box, offsets shifted by +-step
        std::size_t cp = 0, cm = 0;
        for (std::size_t k = 0; k < dims; ++k) {
          long long o_units = idx[k] - j * plan.max_step[k];
          long long base = (j + 1) * plan.max_step[k];
          cp = cp * dim_size(j + 1, k) +
               static_cast<std::size_t>(o_units + st[k] + base);
          cm = cm * dim_size(j + 1, k) +
               static_cast<std::size_t>(o_units - st[k] + base);
        }
        double a = next[up * per_state_next + cp] + qn;
        double b = next[down * per_state_next + cm] - qn;
        cur[s * per_state + cell] = g3_step(a, b).value;
      }
    }
    next.swap(cur);
  }

  std::vector<double> out(nstates);
  for (std::size_t s = 0; s < nstates; ++s) out[s] = next[s];
  return out;
}

// ---------------------------------------------------------------------------
// Brute-force engine.
//
// The nested min-max over a uniform investor grid factorizes: the terminal
// regret is x0 + v - c*1 where v depends only on the market path and
// c = sum_i b_i f_i lies on the same grid. Backward induction over
// (market path, c) therefore reproduces the exact value of the grid game
// while visiting exponentially fewer nodes than the literal recursion.
// ---------------------------------------------------------------------------

struct BruteLevels {
  // node t at level j has children 2t (market up) and 2t+1 (market down)
  std::vector<std::vector<std::uint32_t>> mcode;  // per level, per node
  std::vector<std::vector<Eigen::VectorXd>> v;    // accumulated b*q along path
};

BruteLevels build_paths(const GameSpec& spec, int depth) {
  BruteLevels lv;
  lv.mcode.resize(static_cast<std::size_t>(depth) + 1);
  lv.v.resize(static_cast<std::size_t>(depth) + 1);
  lv.mcode[0] = {spec.m0.code()};
  lv.v[0] = {Eigen::VectorXd::Zero(spec.panel.n())};
  for (int j = 0; j < depth; ++j) {
    std::size_t count = lv.mcode[j].size();
    lv.mcode[j + 1].resize(2 * count);
    lv.v[j + 1].resize(2 * count);
    for (std::size_t t = 0; t < count; ++t) {
      HistoryState m(spec.panel.d(), lv.mcode[j][t]);
      const Eigen::VectorXd& q = spec.panel.q(m.code());
      lv.mcode[j + 1][2 * t] = m.plus().code();
      lv.v[j + 1][2 * t] = lv.v[j][t] + q;
      lv.mcode[j + 1][2 * t + 1] = m.minus().code();
      lv.v[j + 1][2 * t + 1] = lv.v[j][t] - q;
    }
  }
  return lv;
}

double lerp_row(const std::vector<double>& row, double pos) {
  // pos is a fractional index into the row, already in range
  double fl = std::floor(pos);
  std::size_t i0 = static_cast<std::size_t>(fl);
  if (i0 + 1 >= row.size()) return row.back();
  double t = pos - fl;
  return row[i0] + t * (row[i0 + 1] - row[i0]);
}

double brute_value(const GameSpec& spec, double f_grid,
                   const EngineOptions& opts) {
  const int depth = spec.N - spec.ell;
  if (depth > opts.brute_horizon_limit)
    throw HorizonTooLarge("brute engine: horizon " + std::to_string(depth) +
                          " exceeds limit " +
                          std::to_string(opts.brute_horizon_limit));
  if (!(f_grid > 0.0)) throw Error("f_grid must be positive");
  if (depth == 0) return spec.payoff(spec.x0);

  const long long G = std::max<long long>(1, std::llround(1.0 / f_grid));
  const double delta = 1.0 / static_cast<double>(G);
  BruteLevels lv = build_paths(spec, depth);
  const bool monotone = spec.payoff.flags().monotone;
  const bool refine =
      opts.refine && spec.payoff.flags().convex && spec.payoff.flags().monotone;

  auto row_size = [&](int j) {
    return static_cast<std::size_t>(2 * j * G + 1);
  };

  // terminal level: leaf payoff per (path, c)
  std::vector<std::vector<double>> next(lv.mcode[depth].size());
  {
    Eigen::VectorXd x(spec.panel.n());
    for (std::size_t t = 0; t < next.size(); ++t) {
      next[t].resize(row_size(depth));
      Eigen::VectorXd base = spec.x0 + lv.v[depth][t];
      for (long long ci = -depth * G; ci <= depth * G; ++ci) {
        double c = static_cast<double>(ci) * delta;
        x = base.array() - c;
        next[t][static_cast<std::size_t>(ci + depth * G)] = spec.payoff(x);
      }
    }
  }

  std::vector<std::vector<double>> cur;
  for (int j = depth - 1; j >= 0; --j) {
    std::size_t count = lv.mcode[j].size();
    cur.assign(count, {});
    for (std::size_t t = 0; t < count; ++t) {
      const std::vector<double>& A = next[2 * t];      // market up
      const std::vector<double>& B = next[2 * t + 1];  // market down
      std::vector<double>& row = cur[t];
      row.resize(row_size(j));
      const long long child_base = (j + 1) * G;
      for (long long ci = -j * G; ci <= j * G; ++ci) {
        auto aval = [&](long long fi) {
          return A[static_cast<std::size_t>(ci + fi + child_base)];
        };
        auto bval = [&](long long fi) {
          return B[static_cast<std::size_t>(ci - fi + child_base)];
        };
        long long best_fi = -G;
        double best = 0.0;
        if (monotone) {
          // A falls and B rises in fi, so A-B crosses zero once (weakly);
          // the grid minimum of max(A,B) sits next to the crossing.
          if (aval(-G) - bval(-G) <= 0.0) {
            best_fi = -G;
            best = std::max(aval(-G), bval(-G));
          } else if (aval(G) - bval(G) >= 0.0) {
            best_fi = G;
            best = std::max(aval(G), bval(G));
          } else {
            long long lo = -G, hi = G;  // D(lo) > 0 >= D(hi)
            while (hi - lo > 1) {
              long long mid = lo + (hi - lo) / 2;
              if (aval(mid) - bval(mid) > 0.0)
                lo = mid;
              else
                hi = mid;
            }
            double at_lo = std::max(aval(lo), bval(lo));
            double at_hi = std::max(aval(hi), bval(hi));
            best_fi = at_lo <= at_hi ? lo : hi;
            best = std::min(at_lo, at_hi);
          }
        } else {
          best = std::max(aval(-G), bval(-G));
          for (long long fi = -G + 1; fi <= G; ++fi) {
            double m = std::max(aval(fi), bval(fi));
            if (m < best) {
              best = m;
              best_fi = fi;
            }
          }
        }
        if (refine) {
          // golden-section pass between the neighboring grid moves, with
          // the children linearly interpolated
          double c = static_cast<double>(ci) * delta;
          double flo =
              std::max(-1.0, static_cast<double>(best_fi - 1) * delta);
          double fhi = std::min(1.0, static_cast<double>(best_fi + 1) * delta);
          auto phi = [&](double f) {
            double pa = (c + f) / delta + static_cast<double>(child_base);
            double pb = (c - f) / delta + static_cast<double>(child_base);
            return std::max(lerp_row(A, pa), lerp_row(B, pb));
          };
          constexpr double kInvPhi = 0.6180339887498949;
          double x1 = fhi - kInvPhi * (fhi - flo);
          double x2 = flo + kInvPhi * (fhi - flo);
          double p1 = phi(x1), p2 = phi(x2);
          while (fhi - flo > opts.refine_tol) {
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
  return next[0][0];
}

}  // namespace

double value_exact(const GameSpec& spec, const EngineOptions& opts) {
  if (spec.ell < 1 || spec.ell > spec.N)
    throw Error("start day must satisfy 1 <= ell <= N");
  if (spec.ell == spec.N) return spec.payoff(spec.x0);
  const bool g3 = spec.payoff.flags().g3;
  Engine engine = opts.engine;
  if (engine == Engine::automatic) {
    if (!g3)
      engine = Engine::brute;
    else if (spec.N - spec.ell <= opts.path_horizon_limit)
      engine = Engine::path;
    else if (spec.panel.has_grid())
      engine = Engine::lattice;
    else
      throw HorizonTooLarge(
          "horizon too long for the path engine and the panel has no grid");
  }
  switch (engine) {
    case Engine::path:
      if (!g3) throw Error("path engine requires a translation payoff");
      return path_value(spec, opts);
    case Engine::lattice: {
      if (!g3) throw Error("lattice engine requires a translation payoff");
      if (!spec.panel.has_grid())
        throw Error("lattice engine requires a gridded panel");
      return lattice_values_impl(spec, opts)[spec.m0.code()];
    }
    case Engine::brute:
      return brute_value(spec, opts.f_grid, opts);
    case Engine::automatic:
      break;
  }
  throw Error("unreachable engine selection");
}

double value_bruteforce(const GameSpec& spec, double f_grid,
                        const EngineOptions& opts) {
  if (spec.ell < 1 || spec.ell > spec.N)
    throw Error("start day must satisfy 1 <= ell <= N");
  return brute_value(spec, f_grid, opts);
}

StepResult optimal_move(const GameSpec& spec, const EngineOptions& opts) {
  if (spec.ell >= spec.N) throw Error("no move remains at ell == N");
  const Eigen::VectorXd& q = spec.panel.q(spec.m0.code());
  if (spec.payoff.flags().g3) {
    GameSpec up{spec.panel, spec.payoff,       spec.N,
                spec.ell + 1, spec.x0 + q, spec.m0.plus()};
    GameSpec down{spec.panel, spec.payoff,        spec.N,
                  spec.ell + 1, spec.x0 - q, spec.m0.minus()};
    return g3_step(value_exact(up, opts), value_exact(down, opts));
  }
  // grid scan for payoffs without the translation property
  const long long G = std::max<long long>(1, std::llround(1.0 / opts.f_grid));
  StepResult best{std::numeric_limits<double>::infinity(), 0.0};
  for (long long fi = -G; fi <= G; ++fi) {
    double f = static_cast<double>(fi) / static_cast<double>(G);
    double worst = -std::numeric_limits<double>::infinity();
    for (Bit b : {Bit::up, Bit::down}) {
      GameSpec child{spec.panel,
                     spec.payoff,
                     spec.N,
                     spec.ell + 1,
                     spec.x0 + sign(b) * (q.array() - f).matrix(),
                     spec.m0.shift(b)};
      worst = std::max(worst, value_exact(child, opts));
    }
    if (worst < best.value) best = {worst, f};
  }
  return best;
}

std::vector<double> lattice_values(const ExpertPanel& panel,
                                   const Payoff& payoff, int N, int ell,
                                   const Eigen::VectorXd& x0,
                                   const EngineOptions& opts) {
  if (!payoff.flags().g3)
    throw Error("lattice engine requires a translation payoff");
  if (!panel.has_grid()) throw Error("lattice engine requires a gridded panel");
  if (ell < 1 || ell > N) throw Error("start day must satisfy 1 <= ell <= N");
  GameSpec spec{panel, payoff, N, ell, x0, HistoryState(panel.d(), 0)};
  return lattice_values_impl(spec, opts);
}

int day_from_time(int N, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw Error("time must lie in [0,1]");
  double nt = static_cast<double>(N) * t;
  double snapped = std::round(nt);
  double day = std::abs(nt - snapped) <= 1e-12 ? snapped : std::ceil(nt);
  long long ell = static_cast<long long>(day);
  // day 0 probes (t = 0) start the game on its first playable day
  return static_cast<int>(std::clamp<long long>(ell, 1, N));
}

double rescaled_value(const ExpertPanel& panel, const Payoff& payoff, int N,
                      const Eigen::VectorXd& x, double t,
                      const HistoryState& m, Envelope which,
                      const EngineOptions& opts) {
  int ell = day_from_time(N, t);
  double root_n = std::sqrt(static_cast<double>(N));
  Eigen::VectorXd scaled = root_n * x;
  auto one = [&](const HistoryState& state) {
    GameSpec spec{panel, payoff, N, ell, scaled, state};
    return value_exact(spec, opts) / root_n;
  };
  if (which == Envelope::state) return one(m);

  // envelope over start states; the lattice engine yields all of them in
  // one sweep
  bool use_lattice =
      payoff.flags().g3 && panel.has_grid() &&
      (opts.engine == Engine::lattice ||
       (opts.engine == Engine::automatic &&
        N - ell > opts.path_horizon_limit));
  std::vector<double> values;
  if (use_lattice && ell < N) {
    values = lattice_values(panel, payoff, N, ell, scaled, opts);
    for (double& v : values) v /= root_n;
  } else {
    for (const HistoryState& state : enumerate_states(panel.d()))
      values.push_back(one(state));
  }
  return which == Envelope::plus
             ? *std::max_element(values.begin(), values.end())
             : *std::min_element(values.begin(), values.end());
}

namespace {

// k outer steps of the dynamic programming principle with the terminal
// values supplied by the value engine at day ell(spec)
double dpp_outer_g3(const GameSpec& spec, int steps, std::uint32_t mcode,
                    const Eigen::VectorXd& x, const EngineOptions& opts) {
  if (steps == 0) {
    GameSpec inner{spec.panel, spec.payoff, spec.N,
                   spec.ell,   x,           HistoryState(spec.panel.d(), mcode)};
    return value_exact(inner, opts);
  }
  HistoryState m(spec.panel.d(), mcode);
  const Eigen::VectorXd& q = spec.panel.q(mcode);
  double a = dpp_outer_g3(spec, steps - 1, m.plus().code(), x + q, opts);
  double b = dpp_outer_g3(spec, steps - 1, m.minus().code(), x - q, opts);
  return g3_step(a, b).value;
}

double dpp_outer_brute(const GameSpec& spec, int steps, std::uint32_t mcode,
                       const Eigen::VectorXd& x, const EngineOptions& opts) {
  if (steps == 0) {
    GameSpec inner{spec.panel, spec.payoff, spec.N,
                   spec.ell,   x,           HistoryState(spec.panel.d(), mcode)};
    return value_bruteforce(inner, opts.f_grid, opts);
  }
  HistoryState m(spec.panel.d(), mcode);
  const Eigen::VectorXd& q = spec.panel.q(mcode);
  const long long G = std::max<long long>(1, std::llround(1.0 / opts.f_grid));
  double best = std::numeric_limits<double>::infinity();
  for (long long fi = -G; fi <= G; ++fi) {
    double f = static_cast<double>(fi) / static_cast<double>(G);
    double worst = -std::numeric_limits<double>::infinity();
    for (Bit b : {Bit::up, Bit::down}) {
      Eigen::VectorXd xb = x + sign(b) * (q.array() - f).matrix();
      double v = dpp_outer_brute(spec, steps - 1, m.shift(b).code(), xb, opts);
      worst = std::max(worst, v);
    }
    best = std::min(best, worst);
  }
  return best;
}

}  // namespace

double dpp_check(const GameSpec& spec, int k, int probes, std::uint64_t seed,
                 const EngineOptions& opts) {
  if (k < 1 || spec.ell + k > spec.N)
    throw Error("dpp_check needs 1 <= k <= N - ell");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> box(-2.0, 2.0);
  double worst = 0.0;
  const bool g3 = spec.payoff.flags().g3;
  for (int p = 0; p < probes; ++p) {
    Eigen::VectorXd x(spec.panel.n());
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = box(rng);
    HistoryState m(spec.panel.d(),
                   static_cast<std::uint32_t>(rng() % spec.panel.states()));
    // lhs: direct value from day ell; rhs: k outer steps glued to values
    // at day ell + k
    GameSpec lhs_spec{spec.panel, spec.payoff, spec.N, spec.ell, x, m};
    GameSpec terminal{spec.panel, spec.payoff, spec.N, spec.ell + k, x, m};
    double lhs, rhs;
    if (g3) {
      lhs = value_exact(lhs_spec, opts);
      rhs = dpp_outer_g3(terminal, k, m.code(), x, opts);
    } else {
      lhs = value_bruteforce(lhs_spec, opts.f_grid, opts);
      rhs = dpp_outer_brute(terminal, k, m.code(), x, opts);
    }
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

}  // namespace expertgame
