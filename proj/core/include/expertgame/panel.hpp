#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "expertgame/debruijn.hpp"

namespace expertgame {

/// The fixed, publicly known prediction table q : states -> [-1,1]^n for
/// n experts over a d-day history window. Immutable after construction.
///
/// When `denom` is positive every entry lies on the rational grid k/denom;
/// the game engines use this to memoize values on an exact integer lattice.
class ExpertPanel {
 public:
  /// `table[code]` is q(m) for the state with that code; one row per state.
  ExpertPanel(int n, int d, int denom, std::vector<Eigen::VectorXd> table);

  int n() const { return n_; }
  int d() const { return d_; }

  /// Common denominator of the prediction grid; 0 means ungridded.
  int denom() const { return denom_; }
  bool has_grid() const { return denom_ > 0; }

  const Eigen::VectorXd& q(const HistoryState& m) const {
    return table_[m.code()];
  }
  const Eigen::VectorXd& q(std::uint32_t code) const { return table_[code]; }

  std::size_t states() const { return table_.size(); }

  // -- built-in families -------------------------------------------------

  /// Every expert predicts a constant: q_j(m) = values[j] for all m.
  static ExpertPanel static_panel(int d, const Eigen::VectorXd& values,
                                  int denom = 8);

  /// Expert j predicts amps[j] times the parity (product of signs) of the
  /// window moves selected by masks[j].
  static ExpertPanel parity_panel(int d,
                                  const std::vector<std::uint32_t>& masks,
                                  const Eigen::VectorXd& amps, int denom = 8);

  /// Seeded random table with entries k/denom, k in [-denom, denom].
  /// With ensure_valid, rows equal to +-(1,...,1) are redrawn so that the
  /// panel never has all experts saturated in the same direction.
  static ExpertPanel random_panel(int n, int d, int denom, std::uint64_t seed,
                                  bool ensure_valid = true);

  // -- file format ---------------------------------------------------------
  //
  // Header line "n d denom", then 2^d lines "state q_1 ... q_n" with the
  // states in increasing code order, written in the canonical "+/-" form.
  // Values are shortest round-trip decimals, exact on the 1/denom grid.

  static ExpertPanel load(std::istream& in);
  static ExpertPanel load_file(const std::string& path);
  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;

 private:
  int n_;
  int d_;
  int denom_;
  std::vector<Eigen::VectorXd> table_;
};

/// Structural constants of a panel that gate the limit theorems.
struct PanelDiagnostics {
  double vartheta_q = 0.0;               // saturation slack
  std::vector<Eigen::VectorXd> r_table;  // r(m) = (q_1-q_n,...,q_{n-1}-q_n)
  Eigen::MatrixXd A;                     // (n-1)x(n-1) covariance of r
  Eigen::MatrixXd B;                     // n x n covariance of q
  double lambda_min_A = 0.0;
  double lambda_min_B = 0.0;
  double lambda_r = 0.0;  // min(1, lambda_min_A), the rate-formula constant
  bool e1_holds = false;  // vartheta_q > 0
  bool e2_holds = false;  // lambda_min_A > 0
};

double compute_vartheta(const ExpertPanel& panel);
std::vector<Eigen::VectorXd> compute_r_table(const ExpertPanel& panel);
Eigen::MatrixXd compute_A(const ExpertPanel& panel);
Eigen::MatrixXd compute_B(const ExpertPanel& panel);
PanelDiagnostics diagnose(const ExpertPanel& panel);

}  // namespace expertgame
