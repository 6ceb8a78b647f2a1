#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <memory>
#include <optional>
#include <random>
#include <sstream>

#include "expertgame/game.hpp"
#include "expertgame/io.hpp"
#include "expertgame/local.hpp"
#include "expertgame/panel.hpp"
#include "expertgame/payoff.hpp"
#include "expertgame/pde.hpp"
#include "expertgame/stats.hpp"
#include "expertgame/strategy.hpp"
#include "json.hpp"

namespace expertgame::cli {

namespace fs = std::filesystem;

namespace {

Config apply_overrides(Config cfg, const CommonFlags& flags) {
  if (flags.out_dir) cfg.set("out.dir", *flags.out_dir);
  if (flags.seed) cfg.set("seed", std::to_string(*flags.seed));
  if (flags.engine) cfg.set("engine", *flags.engine);
  if (flags.quad_order)
    cfg.set("engine.quad_order", std::to_string(*flags.quad_order));
  return cfg;
}

ExpertPanel panel_from_config(const Config& cfg, std::uint64_t master_seed) {
  std::string source = cfg.get("panel.source", "random");
  int d = cfg.get_int("panel.d", 1);
  int denom = cfg.get_int("panel.denom", 8);
  if (source == "file")
    return ExpertPanel::load_file(cfg.get("panel.path", "panel.txt"));
  if (source == "static") {
    std::vector<double> vals = cfg.get_doubles("panel.values", "1,-1");
    Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i)
      v[static_cast<Eigen::Index>(i)] = vals[i];
    return ExpertPanel::static_panel(d, v, denom);
  }
  if (source == "parity") {
    std::vector<int> masks = cfg.get_ints("panel.masks", "1,2");
    std::vector<double> amps_in =
        cfg.get_doubles("panel.amps", std::string(masks.size(), ' '));
    Eigen::VectorXd amps(static_cast<Eigen::Index>(masks.size()));
    for (std::size_t i = 0; i < masks.size(); ++i)
      amps[static_cast<Eigen::Index>(i)] =
          i < amps_in.size() ? amps_in[i] : 1.0;
    std::vector<std::uint32_t> m(masks.begin(), masks.end());
    return ExpertPanel::parity_panel(d, m, amps, denom);
  }
  if (source == "random") {
    int n = cfg.get_int("panel.n", 2);
    std::uint64_t seed = cfg.get_u64("panel.seed", master_seed);
    return ExpertPanel::random_panel(n, d, denom, seed);
  }
  throw Error("unknown panel.source '" + source + "'");
}

Payoff payoff_from_config(const Config& cfg) {
  return Payoff::parse(cfg.get("payoff", "max"));
}

EngineOptions engine_from_config(const Config& cfg) {
  EngineOptions opts;
  std::string engine = cfg.get("engine", "auto");
  if (engine == "brute")
    opts.engine = Engine::brute;
  else if (engine == "path")
    opts.engine = Engine::path;
  else if (engine == "lattice")
    opts.engine = Engine::lattice;
  else if (engine == "auto")
    opts.engine = Engine::automatic;
  else
    throw Error("unknown engine '" + engine + "'");
  opts.f_grid = cfg.get_double("engine.f_grid", opts.f_grid);
  return opts;
}

QuadratureOptions quad_from_config(const Config& cfg) {
  QuadratureOptions q;
  q.tol = cfg.get_double("engine.quad_tol", q.tol);
  q.gh_order = cfg.get_int("engine.quad_order", q.gh_order);
  std::string method = cfg.get("engine.quad_method", "adaptive");
  if (method == "adaptive")
    q.method = QuadratureOptions::Method::adaptive;
  else if (method == "tensor")
    q.method = QuadratureOptions::Method::tensor_hermite;
  else if (method == "mc")
    q.method = QuadratureOptions::Method::monte_carlo;
  else
    throw Error("unknown quadrature method '" + method + "'");
  q.mc_samples = static_cast<long long>(cfg.get_u64("engine.mc_samples",
                                                    q.mc_samples));
  q.mc_seed = cfg.get_u64("engine.mc_seed", q.mc_seed);
  return q;
}

DerivMode deriv_mode_from_config(const Config& cfg) {
  std::string mode = cfg.get("pde.deriv_mode", "fd");
  if (mode == "fd") return DerivMode::central_diff;
  if (mode == "quad") return DerivMode::quadrature;
  throw Error("unknown pde.deriv_mode '" + mode + "'");
}

struct Probe {
  Eigen::VectorXd x;
  double t = 0.0;
};

std::vector<Probe> probes_from_config(const Config& cfg, int n) {
  std::string text = cfg.get("probes", "0@0");
  std::vector<Probe> probes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    std::size_t at = item.find('@');
    if (at == std::string::npos) throw Error("probe needs the form x@t");
    std::vector<double> xs = parse_double_list(item.substr(0, at));
    double t = 0.0;
    {
      std::string ttxt = item.substr(at + 1);
      std::stringstream ts(ttxt);
      if (!(ts >> t)) throw Error("bad probe time '" + ttxt + "'");
    }
    Probe p;
    p.t = t;
    p.x.resize(n);
    if (xs.size() == 1) {
      p.x.setConstant(xs[0]);
    } else if (static_cast<int>(xs.size()) == n) {
      for (int i = 0; i < n; ++i) p.x[i] = xs[static_cast<std::size_t>(i)];
    } else {
      throw Error("probe x must have 1 or n entries");
    }
    probes.push_back(std::move(p));
  }
  if (probes.empty()) throw Error("no probes given");
  return probes;
}

Eigen::VectorXd vector_from_config(const Config& cfg, const std::string& key,
                                   int n) {
  std::vector<double> xs = cfg.get_doubles(key, "0");
  Eigen::VectorXd x(n);
  if (xs.size() == 1)
    x.setConstant(xs[0]);
  else if (static_cast<int>(xs.size()) == n)
    for (int i = 0; i < n; ++i) x[i] = xs[static_cast<std::size_t>(i)];
  else
    throw Error(key + " must have 1 or n entries");
  return x;
}

HistoryState state_from_config(const Config& cfg, const std::string& key,
                               int d) {
  std::string text = cfg.get(key, std::string(static_cast<std::size_t>(d), '+'));
  HistoryState m = HistoryState::parse(text);
  if (m.d() != d) throw Error(key + " width differs from the panel window");
  return m;
}

std::string config_hash(const Config& cfg) {
  return hash_hex(fnv1a64(cfg.canonical()));
}

fs::path ensure_out_dir(const Config& cfg) {
  fs::path dir = cfg.get("out.dir", ".");
  fs::create_directories(dir);
  return dir;
}

}  // namespace

Config load_config(const CommonFlags& flags) {
  Config cfg;
  if (!flags.config_path.empty()) cfg = Config::load_file(flags.config_path);
  return apply_overrides(std::move(cfg), flags);
}

int cmd_validate(const std::string& panel_path, std::ostream& out) {
  ExpertPanel panel = ExpertPanel::load_file(panel_path);
  PanelDiagnostics diag = diagnose(panel);
  out << "n " << panel.n() << "\n";
  out << "d " << panel.d() << "\n";
  out << "denom " << panel.denom() << "\n";
  out << "vartheta_q " << format_double(diag.vartheta_q) << "\n";
  out << "lambda_min_A " << format_double(diag.lambda_min_A) << "\n";
  out << "lambda_min_B " << format_double(diag.lambda_min_B) << "\n";
  out << "lambda_r " << format_double(diag.lambda_r) << "\n";
  bool b_psd = diag.lambda_min_B >= -1e-12;
  out << "E1 " << (diag.e1_holds ? "pass" : "fail") << "\n";
  out << "E2 " << (diag.e2_holds ? "pass" : "fail") << "\n";
  out << "B_psd " << (b_psd ? "pass" : "fail") << "\n";
  return diag.e1_holds && diag.e2_holds && b_psd ? 0 : 1;
}

int cmd_value(const CommonFlags& flags, std::ostream& out) {
  Config cfg = load_config(flags);
  std::uint64_t seed = cfg.get_u64("seed", 0);
  ExpertPanel panel = panel_from_config(cfg, seed);
  Payoff payoff = payoff_from_config(cfg);
  EngineOptions opts = engine_from_config(cfg);
  int N = cfg.get_int("value.N", 16);
  Eigen::VectorXd x = vector_from_config(cfg, "value.x", panel.n());
  HistoryState m = state_from_config(cfg, "value.m", panel.d());
  int day = cfg.has("value.day") ? cfg.get_int("value.day", 1)
                                 : day_from_time(N, cfg.get_double("value.t", 0.0));
  GameSpec spec{panel, payoff, N, day, x, m};
  out << "value " << format_double(value_exact(spec, opts)) << "\n";
  if (day < N) {
    StepResult step = optimal_move(spec, opts);
    out << "f_star " << format_double(step.f_star) << "\n";
  }
  return 0;
}

int cmd_pde(const CommonFlags& flags, std::ostream& out) {
  Config cfg = load_config(flags);
  std::uint64_t seed = cfg.get_u64("seed", 0);
  ExpertPanel panel = panel_from_config(cfg, seed);
  PdeSolution sol(panel, payoff_from_config(cfg), quad_from_config(cfg));
  Eigen::VectorXd x = vector_from_config(cfg, "pde.x", panel.n());
  double t = cfg.get_double("pde.t", 0.0);
  out << "u " << format_double(sol.u(x, t)) << "\n";
  if (t < 1.0) {
    Derivs d = sol.derivatives(x, t, deriv_mode_from_config(cfg));
    out << "grad";
    for (int i = 0; i < panel.n(); ++i) out << ' ' << format_double(d.grad[i]);
    out << "\n";
    for (int i = 0; i < panel.n(); ++i) {
      out << "hess";
      for (int j = 0; j < panel.n(); ++j)
        out << ' ' << format_double(d.hess(i, j));
      out << "\n";
    }
    out << "ut " << format_double(d.ut) << "\n";
    out << "residual " << format_double(operator_residual(d, panel)) << "\n";
  }
  return 0;
}

int cmd_converge(const CommonFlags& flags, std::ostream& out) {
  Config cfg = load_config(flags);
  std::uint64_t seed = cfg.get_u64("seed", 0);
  ExpertPanel panel = panel_from_config(cfg, seed);
  Payoff payoff = payoff_from_config(cfg);
  EngineOptions opts = engine_from_config(cfg);
  QuadratureOptions quad = quad_from_config(cfg);
  std::vector<int> ns = cfg.get_ints("sweep.n_values", "64,128,256,512,1024");
  std::vector<Probe> probes = probes_from_config(cfg, panel.n());
  std::string engine_name = cfg.get("engine", "auto");
  PdeSolution sol(panel, payoff, quad);

  struct Record {
    int N = 0;
    Probe probe;
    double plus = 0.0, minus = 0.0, pde = 0.0;
    double err_plus = 0.0, err_minus = 0.0;
    long long wall_ms = 0;
    std::string error;
  };

  std::vector<double> pde_values(probes.size());
  for (std::size_t pi = 0; pi < probes.size(); ++pi)
    pde_values[pi] = sol.u(probes[pi].x, probes[pi].t);

  // sweep points dispatch to workers; rows are emitted in config order
  std::vector<std::future<Record>> futures;
  for (int N : ns) {
    for (std::size_t pi = 0; pi < probes.size(); ++pi) {
      futures.push_back(std::async(std::launch::async, [&, N, pi]() {
        Record rec;
        rec.N = N;
        rec.probe = probes[pi];
        rec.pde = pde_values[pi];
        auto t0 = std::chrono::steady_clock::now();
        try {
          HistoryState m0(panel.d(), 0);
          rec.plus = rescaled_value(panel, payoff, N, rec.probe.x, rec.probe.t,
                                    m0, Envelope::plus, opts);
          rec.minus = rescaled_value(panel, payoff, N, rec.probe.x,
                                     rec.probe.t, m0, Envelope::minus, opts);
          rec.err_plus = std::abs(rec.plus - rec.pde);
          rec.err_minus = std::abs(rec.minus - rec.pde);
        } catch (const std::exception& e) {
          rec.error = e.what();
          for (char& c : rec.error)
            if (c == ',' || c == '\n') c = ';';
        }
        auto t1 = std::chrono::steady_clock::now();
        if (flags.timing)
          rec.wall_ms =
              std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0)
                  .count();
        return rec;
      }));
    }
  }

  std::vector<Record> records;
  for (auto& f : futures) records.push_back(f.get());

  // fit the observed rate on the worst error per sweep N
  std::vector<double> xs, ys;
  for (int N : ns) {
    double worst = 0.0;
    bool ok = false;
    for (const Record& r : records)
      if (r.N == N && r.error.empty()) {
        worst = std::max(worst, std::max(r.err_plus, r.err_minus));
        ok = true;
      }
    if (ok && worst > 0.0) {
      xs.push_back(static_cast<double>(N));
      ys.push_back(worst);
    }
  }
  std::string slope_text = "na";
  if (xs.size() >= 2)
    slope_text = format_double(fit_loglog_slope(xs, ys));

  fs::path dir = ensure_out_dir(cfg);
  fs::path file = dir / "converge.csv";
  std::string buf =
      "N,t,x,u_N_plus,u_N_minus,u_pde,err_plus,err_minus,engine,wall_time_ms,"
      "error\n";
  for (const Record& r : records) {
    buf += std::to_string(r.N);
    buf += ',';
    append_double(buf, r.probe.t);
    buf += ',';
    for (int i = 0; i < r.probe.x.size(); ++i) {
      if (i) buf += ';';
      append_double(buf, r.probe.x[i]);
    }
    buf += ',';
    if (r.error.empty()) {
      append_double(buf, r.plus);
      buf += ',';
      append_double(buf, r.minus);
      buf += ',';
      append_double(buf, r.pde);
      buf += ',';
      append_double(buf, r.err_plus);
      buf += ',';
      append_double(buf, r.err_minus);
    } else {
      buf += ",,,,";
    }
    buf += ',';
    buf += engine_name;
    buf += ',';
    buf += std::to_string(r.wall_ms);
    buf += ',';
    buf += r.error;
    buf += '\n';
  }
  buf += csv_metadata_line(config_hash(cfg), seed);
  buf += " slope=";
  buf += slope_text;
  buf += '\n';
  std::ofstream fout(file);
  if (!fout) throw Error("cannot write " + file.string());
  fout << buf;
  out << "wrote " << file.string() << " (" << records.size()
      << " records), slope=" << slope_text << "\n";
  return 0;
}

int cmd_simulate(const CommonFlags& flags, std::ostream& out) {
  Config cfg = load_config(flags);
  std::uint64_t seed = cfg.get_u64("seed", 0);
  ExpertPanel panel = panel_from_config(cfg, seed);
  Payoff payoff = payoff_from_config(cfg);
  EngineOptions opts = engine_from_config(cfg);
  int N = cfg.get_int("sim.days", 16);
  Eigen::VectorXd x0 = vector_from_config(cfg, "sim.x0", panel.n());
  HistoryState m0 = state_from_config(cfg, "sim.m0", panel.d());
  std::string investor_name = cfg.get("sim.investor", "exact");
  std::string market_name = cfg.get("sim.market", "exhaustive");
  int runs = market_name == "random" ? cfg.get_int("sim.seeds", 1) : 1;
  DerivMode mode = DerivMode::quadrature;

  std::optional<PdeSolution> sol;
  if (investor_name != "exact" || market_name == "greedy")
    sol.emplace(panel, payoff, quad_from_config(cfg));

  int k = 0;
  if (investor_name == "block") {
    std::string rule = cfg.get("sim.k", "auto");
    if (rule == "auto")
      k = std::max(1, static_cast<int>(std::ceil(
                          std::cbrt(static_cast<double>(panel.d())) *
                          std::pow(static_cast<double>(N), 1.0 / 6.0))));
    else
      k = cfg.get_int("sim.k", 4);
  }

  auto make_investor = [&]() -> std::unique_ptr<Investor> {
    if (investor_name == "exact")
      return std::make_unique<ExactInvestor>(panel, payoff, opts);
    if (investor_name == "gradient")
      return std::make_unique<GradientInvestor>(*sol, mode);
    if (investor_name == "block")
      return std::make_unique<BlockInvestor>(*sol, k, N, mode);
    throw Error("unknown sim.investor '" + investor_name + "'");
  };
  auto make_market = [&]() -> std::unique_ptr<Market> {
    if (market_name == "exhaustive")
      return std::make_unique<ExhaustiveMarket>(panel, payoff, opts);
    if (market_name == "greedy") return std::make_unique<GreedyMarket>(*sol, mode);
    if (market_name == "random") return std::make_unique<RandomMarket>();
    throw Error("unknown sim.market '" + market_name + "'");
  };

  fs::path dir = ensure_out_dir(cfg);
  std::string hash = config_hash(cfg);
  nlohmann::json summary;
  summary["investor"] = investor_name;
  summary["market"] = market_name;
  summary["N"] = N;
  summary["k"] = k;
  double mean = 0.0, worst = -std::numeric_limits<double>::infinity();
  nlohmann::json runs_json = nlohmann::json::array();
  for (int run = 0; run < runs; ++run) {
    std::uint64_t run_seed = seed + static_cast<std::uint64_t>(run);
    auto investor = make_investor();
    auto market = make_market();
    Trajectory traj =
        simulate(panel, payoff, N, x0, m0, *investor, *market, run_seed);
    std::string name = "trajectory_" + investor_name + "_vs_" + market_name +
                       "_" + std::to_string(run_seed) + ".csv";
    fs::path file = dir / name;
    std::ofstream fout(file);
    if (!fout) throw Error("cannot write " + file.string());
    write_trajectory_csv(traj, panel.n(), fout, hash, run_seed);
    mean += traj.final_payoff / runs;
    worst = std::max(worst, traj.final_payoff);
    nlohmann::json rj;
    rj["seed"] = run_seed;
    rj["final_payoff"] = traj.final_payoff;
    rj["clamp_count"] = traj.investor_clamps;
    rj["ragged_blocks"] = traj.ragged_blocks;
    rj["file"] = name;
    runs_json.push_back(rj);
  }
  summary["runs"] = runs_json;
  summary["mean_final_payoff"] = mean;
  summary["max_final_payoff"] = worst;
  summary["config_hash"] = hash;
  summary["seed"] = seed;
  fs::path sfile = dir / "summary.json";
  std::ofstream sout(sfile);
  if (!sout) throw Error("cannot write " + sfile.string());
  sout << summary.dump(2) << "\n";
  out << "wrote " << sfile.string() << ", mean final payoff "
      << format_double(mean) << "\n";
  return 0;
}

int cmd_local(const CommonFlags& flags, std::ostream& out) {
  Config cfg = load_config(flags);
  std::uint64_t seed = cfg.get_u64("seed", 0);
  ExpertPanel panel = panel_from_config(cfg, seed);
  std::vector<int> ks = cfg.get_ints("local.k_values", "2,3,4,5");
  std::vector<double> eps_values =
      cfg.get_doubles("local.eps_values", "1e-2,1e-3,1e-4");
  double f_grid = cfg.get_double("engine.f_grid", 1e-3);
  double xnorm = cfg.get_double("local.xnorm", 1.0);

  // seeded context: symmetric X with the requested scale, positive p
  std::mt19937_64 rng(cfg.get_u64("local.seed", seed));
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.5, 2.0);
  int n = panel.n();
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = box(rng);
  Eigen::MatrixXd X = 0.5 * xnorm * (M + M.transpose());
  Eigen::VectorXd p(n);
  for (int i = 0; i < n; ++i) p[i] = pos(rng);
  HessianContext ctx(X, p);
  HistoryState m = state_from_config(cfg, "local.m", panel.d());

  double limit = h_limit(ctx, panel);
  fs::path dir = ensure_out_dir(cfg);
  fs::path file = dir / "local.csv";
  std::string buf =
      "k,eps,h_k,h_k_over_k,h_limit,delta_k,gap,bound_shape,in_regime,error\n";
  for (int k : ks) {
    HTable table = h_recursive(ctx, panel, k);
    for (double eps : eps_values) {
      buf += std::to_string(k);
      buf += ',';
      append_double(buf, eps);
      buf += ',';
      append_double(buf, table.value_at(k, m));
      buf += ',';
      append_double(buf, table.value_at(k, m) / k);
      buf += ',';
      append_double(buf, limit);
      buf += ',';
      append_double(buf, table.delta_at(k, m));
      buf += ',';
      std::string error;
      try {
        CellGap gap = cell_gap(ctx, panel, m, k, eps, f_grid);
        append_double(buf, gap.gap);
        buf += ',';
        append_double(buf, gap.bound_shape);
        buf += ',';
        buf += gap.in_regime ? '1' : '0';
      } catch (const std::exception& e) {
        buf += ",,";
        error = e.what();
        for (char& c : error)
          if (c == ',' || c == '\n') c = ';';
      }
      buf += ',';
      buf += error;
      buf += '\n';
    }
  }
  buf += csv_metadata_line(config_hash(cfg), seed);
  buf += '\n';
  std::ofstream fout(file);
  if (!fout) throw Error("cannot write " + file.string());
  fout << buf;
  out << "wrote " << file.string() << "\n";
  return 0;
}

}  // namespace expertgame::cli
