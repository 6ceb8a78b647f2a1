#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace expertgame {

/// Terminal payoff g applied to the regret vector, together with its
/// declared structural flags:
///
///   strict monotonicity:  g(x+v) >= g(x) + g1_theta * <v,1>  for v >= 0
///   positive homogeneity: g(s x)  = s g(x)                   for s > 0
///   translation:          g(x+s1) = g(x) + s
///
/// The flags are declarations; check_properties() audits them numerically.
class Payoff {
 public:
  using Eval = std::function<double(const Eigen::VectorXd&)>;
  using Grad = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  struct Flags {
    std::optional<double> g1_theta;   // set only when strict monotonicity holds
    bool g2 = false;                  // positive homogeneity
    bool g3 = false;                  // translation property
    bool convex = false;              // enables refinement in grid engines
    bool monotone = false;            // coordinatewise nondecreasing
    std::optional<double> lipschitz;  // Euclidean Lipschitz constant
  };

  Payoff(std::string name, Eval eval, Grad grad, Flags flags)
      : name_(std::move(name)),
        eval_(std::move(eval)),
        grad_(std::move(grad)),
        flags_(flags) {}

  double operator()(const Eigen::VectorXd& x) const { return eval_(x); }
  double eval(const Eigen::VectorXd& x) const { return eval_(x); }

  /// Subgradient selection; at kinks the smallest-index argmax wins.
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const { return grad_(x); }

  const Flags& flags() const { return flags_; }
  const std::string& name() const { return name_; }

  /// Best regret against the best-performing expert: g(x) = max_i x_i.
  /// Ships with g1_theta unset: raising a non-argmax coordinate alone
  /// gains nothing, so no positive theta satisfies the strict form.
  /// Only the weaker <grad,1> >= theta holds, which is what the
  /// downstream solvers actually rely on.
  static Payoff max();

  /// g(x) = <w,x> with w > 0 and sum(w) = 1.
  static Payoff linear(const Eigen::VectorXd& w);

  /// Smoothed maximum delta*log(sum exp(x_i/delta)); translation holds,
  /// homogeneity does not.
  static Payoff smoothed_max(double delta);

  /// CLI spec strings: "max", "linear:w1,...,wn", "softmax:delta".
  static Payoff parse(std::string_view spec);

 private:
  std::string name_;
  Eval eval_;
  Grad grad_;
  Flags flags_;
};

/// Numerical audit of the declared flags over seeded random probes.
struct PropertyReport {
  struct Entry {
    bool declared = false;
    bool measured = false;      // a violation figure was computed
    double max_violation = 0.0;
    bool confirmed = false;     // declared and max_violation <= tolerance
  };
  Entry g1, g2, g3;
  int samples = 0;
  std::uint64_t seed = 0;
  static constexpr double kTolerance = 1e-9;
};

/// Samples x, s, v and measures the worst violation of each property.
/// g2/g3 are always measured (a violation on an undeclared flag is
/// informative); g1 is measured only when a theta is declared.
PropertyReport check_properties(const Payoff& g, int dim, int samples,
                                std::uint64_t seed);

}  // namespace expertgame
