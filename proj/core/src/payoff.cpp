#include "expertgame/payoff.hpp"

#include <charconv>
#include <cmath>
#include <random>

#include "expertgame/errors.hpp"

namespace expertgame {

Payoff Payoff::max() {
  Flags f;
  f.g2 = true;
  f.g3 = true;
  f.convex = true;
  f.monotone = true;
  f.lipschitz = 1.0;
  return Payoff(
      "max",
      [](const Eigen::VectorXd& x) { return x.maxCoeff(); },
      [](const Eigen::VectorXd& x) {
        Eigen::Index arg = 0;
        x.maxCoeff(&arg);  // Eigen returns the first (smallest-index) argmax
        Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
        g[arg] = 1.0;
        return g;
      },
      f);
}

Payoff Payoff::linear(const Eigen::VectorXd& w) {
  if (w.size() < 1 || w.minCoeff() <= 0.0)
    throw Error("linear payoff needs strictly positive weights");
  Flags f;
  f.g1_theta = w.minCoeff();
  f.g2 = true;
  f.g3 = std::abs(w.sum() - 1.0) <= 1e-12;
  f.convex = true;
  f.monotone = true;
  f.lipschitz = w.norm();
  Eigen::VectorXd weights = w;
  return Payoff(
      "linear",
      [weights](const Eigen::VectorXd& x) { return weights.dot(x); },
      [weights](const Eigen::VectorXd&) { return weights; }, f);
}

Payoff Payoff::smoothed_max(double delta) {
  if (!(delta > 0.0)) throw Error("softmax delta must be positive");
  Flags f;
  f.g3 = true;
  f.convex = true;
  f.monotone = true;
  f.lipschitz = 1.0;
  return Payoff(
      "softmax",
      [delta](const Eigen::VectorXd& x) {
        double m = x.maxCoeff();
        double acc = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i)
          acc += std::exp((x[i] - m) / delta);
        return m + delta * std::log(acc);
      },
      [delta](const Eigen::VectorXd& x) {
        double m = x.maxCoeff();
        Eigen::VectorXd e(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i)
          e[i] = std::exp((x[i] - m) / delta);
        return Eigen::VectorXd(e / e.sum());
      },
      f);
}

namespace {

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string_view tok = text.substr(
        pos, comma == std::string_view::npos ? std::string_view::npos
                                             : comma - pos);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
      throw Error("bad number '" + std::string(tok) + "' in payoff spec");
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

Payoff Payoff::parse(std::string_view spec) {
  if (spec == "max") return Payoff::max();
  if (spec.rfind("linear:", 0) == 0) {
    auto ws = parse_number_list(spec.substr(7));
    Eigen::VectorXd w(static_cast<Eigen::Index>(ws.size()));
    for (std::size_t i = 0; i < ws.size(); ++i)
      w[static_cast<Eigen::Index>(i)] = ws[i];
    return Payoff::linear(w);
  }
  if (spec.rfind("softmax:", 0) == 0) {
    auto ds = parse_number_list(spec.substr(8));
    if (ds.size() != 1) throw Error("softmax spec takes one delta");
    return Payoff::smoothed_max(ds[0]);
  }
  throw Error("unknown payoff spec '" + std::string(spec) +
              "' (expected max | linear:w1,...,wn | softmax:delta)");
}

PropertyReport check_properties(const Payoff& g, int dim, int samples,
                                std::uint64_t seed) {
  if (samples < 1) throw Error("check_properties needs samples >= 1");
  PropertyReport rep;
  rep.samples = samples;
  rep.seed = seed;
  const auto& fl = g.flags();
  rep.g1.declared = fl.g1_theta.has_value();
  rep.g2.declared = fl.g2;
  rep.g3.declared = fl.g3;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> box(-5.0, 5.0);
  std::uniform_real_distribution<double> pos(0.0, 3.0);
  std::uniform_real_distribution<double> scale(0.05, 4.0);

  for (int it = 0; it < samples; ++it) {
    Eigen::VectorXd x(dim);
    for (int i = 0; i < dim; ++i) x[i] = box(rng);
    double gx = g(x);

    double s = scale(rng);
    rep.g2.measured = true;
    rep.g2.max_violation =
        std::max(rep.g2.max_violation, std::abs(g(s * x) - s * gx));

    double t = box(rng);
    rep.g3.measured = true;
    rep.g3.max_violation = std::max(
        rep.g3.max_violation,
        std::abs(g(x + Eigen::VectorXd::Constant(dim, t)) - gx - t));

    if (fl.g1_theta) {
      Eigen::VectorXd v(dim);
      for (int i = 0; i < dim; ++i) v[i] = pos(rng);
      rep.g1.measured = true;
      double gain = g(x + v) - gx;
      rep.g1.max_violation = std::max(
          rep.g1.max_violation, *fl.g1_theta * v.sum() - gain);
    }
  }
  rep.g1.max_violation = std::max(rep.g1.max_violation, 0.0);

  auto confirm = [](PropertyReport::Entry& e) {
    e.confirmed =
        e.declared && e.measured && e.max_violation <= PropertyReport::kTolerance;
  };
  confirm(rep.g1);
  confirm(rep.g2);
  confirm(rep.g3);
  return rep;
}

}  // namespace expertgame
