#include "expertgame/panel.hpp"

#include <Eigen/Eigenvalues>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "expertgame/errors.hpp"

namespace expertgame {

namespace {

void format_double(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  out.append(buf, ptr);
}

}  // namespace

ExpertPanel::ExpertPanel(int n, int d, int denom,
                         std::vector<Eigen::VectorXd> table)
    : n_(n), d_(d), denom_(denom), table_(std::move(table)) {
  if (n_ < 2) throw Error("panel needs at least two experts");
  if (d_ < 1 || d_ > HistoryState::kMaxWindow)
    throw WindowTooLarge("panel window d=" + std::to_string(d_));
  if (denom_ < 0) throw Error("panel denom must be >= 0");
  if (table_.size() != state_count(d_))
    throw Error("panel table must have exactly 2^d rows");
  for (const auto& row : table_) {
    if (row.size() != n_) throw Error("panel row has wrong expert count");
    for (Eigen::Index j = 0; j < row.size(); ++j) {
      double v = row[j];
      if (!(v >= -1.0 && v <= 1.0))
        throw Error("prediction outside [-1,1]");
      if (denom_ > 0 &&
          std::abs(v * denom_ - std::round(v * denom_)) > 1e-9)
        throw Error("prediction off the declared 1/denom grid");
    }
  }
}

ExpertPanel ExpertPanel::static_panel(int d, const Eigen::VectorXd& values,
                                      int denom) {
  std::vector<Eigen::VectorXd> table(state_count(d), values);
  return ExpertPanel(static_cast<int>(values.size()), d, denom,
                     std::move(table));
}

ExpertPanel ExpertPanel::parity_panel(int d,
                                      const std::vector<std::uint32_t>& masks,
                                      const Eigen::VectorXd& amps, int denom) {
  int n = static_cast<int>(masks.size());
  if (amps.size() != n) throw Error("parity panel: one amplitude per expert");
  std::vector<Eigen::VectorXd> table;
  table.reserve(state_count(d));
  for (const HistoryState& m : enumerate_states(d)) {
    Eigen::VectorXd row(n);
    for (int j = 0; j < n; ++j) {
      int parity = 1;
      for (int i = 0; i < d; ++i)
        if ((masks[static_cast<std::size_t>(j)] >> i) & 1u)
          parity *= sign(m.at(i));
      row[j] = amps[j] * parity;
    }
    table.push_back(std::move(row));
  }
  return ExpertPanel(n, d, denom, std::move(table));
}

ExpertPanel ExpertPanel::random_panel(int n, int d, int denom,
                                      std::uint64_t seed, bool ensure_valid) {
  if (denom < 1) throw Error("random panel needs denom >= 1");
  std::mt19937_64 rng(seed);
  auto draw_entry = [&]() {
    // bounded draw via explicit rejection, stable across platforms
    std::uint64_t range = static_cast<std::uint64_t>(2 * denom + 1);
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t r;
    do {
      r = rng();
    } while (r >= limit);
    return (static_cast<int>(r % range) - denom) / static_cast<double>(denom);
  };
  std::vector<Eigen::VectorXd> table;
  table.reserve(state_count(d));
  for (std::size_t s = 0; s < state_count(d); ++s) {
    Eigen::VectorXd row(n);
    do {
      for (int j = 0; j < n; ++j) row[j] = draw_entry();
    } while (ensure_valid &&
             (row.isApproxToConstant(1.0) || row.isApproxToConstant(-1.0)));
    table.push_back(std::move(row));
  }
  return ExpertPanel(n, d, denom, std::move(table));
}

ExpertPanel ExpertPanel::load(std::istream& in) {
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  ++lineno;
  int n = 0, d = 0, denom = 0;
  {
    std::istringstream hs(line);
    if (!(hs >> n >> d >> denom))
      throw ParseError(lineno, "header must be 'n d denom'");
  }
  if (d < 1 || d > HistoryState::kMaxWindow)
    throw ParseError(lineno, "window length out of range");
  std::vector<Eigen::VectorXd> table(state_count(d));
  std::vector<bool> seen(state_count(d), false);
  for (std::size_t i = 0; i < state_count(d); ++i) {
    if (!std::getline(in, line))
      throw ParseError(lineno + 1, "expected 2^d prediction rows");
    ++lineno;
    std::istringstream ls(line);
    std::string state_text;
    if (!(ls >> state_text)) throw ParseError(lineno, "missing state");
    HistoryState m(1, 0);
    try {
      m = HistoryState::parse(state_text);
    } catch (const Error& e) {
      throw ParseError(lineno, e.what());
    }
    if (m.d() != d) throw ParseError(lineno, "state width differs from header");
    if (seen[m.code()]) throw ParseError(lineno, "duplicate state");
    seen[m.code()] = true;
    Eigen::VectorXd row(n);
    for (int j = 0; j < n; ++j)
      if (!(ls >> row[j]))
        throw ParseError(lineno, "expected " + std::to_string(n) +
                                     " predictions");
    double extra;
    if (ls >> extra) throw ParseError(lineno, "trailing values");
    table[m.code()] = std::move(row);
  }
  try {
    return ExpertPanel(n, d, denom, std::move(table));
  } catch (const Error& e) {
    throw ParseError(lineno, e.what());
  }
}

ExpertPanel ExpertPanel::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open panel file '" + path + "'");
  return load(in);
}

void ExpertPanel::save(std::ostream& out) const {
  std::string buf;
  buf += std::to_string(n_);
  buf += ' ';
  buf += std::to_string(d_);
  buf += ' ';
  buf += std::to_string(denom_);
  buf += '\n';
  for (const HistoryState& m : enumerate_states(d_)) {
    buf += m.to_string();
    const Eigen::VectorXd& row = table_[m.code()];
    for (Eigen::Index j = 0; j < row.size(); ++j) {
      buf += ' ';
      format_double(buf, row[j]);
    }
    buf += '\n';
  }
  out << buf;
}

void ExpertPanel::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write panel file '" + path + "'");
  save(out);
}

double compute_vartheta(const ExpertPanel& panel) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < panel.states(); ++c) {
    const Eigen::VectorXd& q = panel.q(static_cast<std::uint32_t>(c));
    double up = 0.0, down = 0.0;
    for (Eigen::Index j = 0; j < q.size(); ++j) {
      up += 1.0 - std::max(q[j], 0.0);
      down += 1.0 + std::min(q[j], 0.0);
    }
    best = std::min(best, std::min(up, down));
  }
  return best;
}

std::vector<Eigen::VectorXd> compute_r_table(const ExpertPanel& panel) {
  std::vector<Eigen::VectorXd> r;
  r.reserve(panel.states());
  int n = panel.n();
  for (std::size_t c = 0; c < panel.states(); ++c) {
    const Eigen::VectorXd& q = panel.q(static_cast<std::uint32_t>(c));
    r.push_back(q.head(n - 1).array() - q[n - 1]);
  }
  return r;
}

Eigen::MatrixXd compute_A(const ExpertPanel& panel) {
  int n = panel.n();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n - 1, n - 1);
  for (const auto& r : compute_r_table(panel)) A += r * r.transpose();
  A /= std::pow(2.0, panel.d() + 1);
  return A;
}

Eigen::MatrixXd compute_B(const ExpertPanel& panel) {
  int n = panel.n();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t c = 0; c < panel.states(); ++c) {
    const Eigen::VectorXd& q = panel.q(static_cast<std::uint32_t>(c));
    B += q * q.transpose();
  }
  B /= std::pow(2.0, panel.d() + 1);
  return B;
}

PanelDiagnostics diagnose(const ExpertPanel& panel) {
  PanelDiagnostics diag;
  diag.vartheta_q = compute_vartheta(panel);
  diag.r_table = compute_r_table(panel);
  diag.A = compute_A(panel);
  diag.B = compute_B(panel);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esA(diag.A);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esB(diag.B);
  diag.lambda_min_A = esA.eigenvalues().minCoeff();
  diag.lambda_min_B = esB.eigenvalues().minCoeff();
  diag.lambda_r = std::min(1.0, diag.lambda_min_A);
  diag.e1_holds = diag.vartheta_q > 0.0;
  diag.e2_holds = diag.lambda_min_A > 0.0;
  return diag;
}

}  // namespace expertgame
