#include <sstream>

#include "doctest.h"
#include "expertgame/panel.hpp"

using namespace expertgame;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

ExpertPanel pm_panel(int d) {  // one permanent bull, one permanent bear
  return ExpertPanel::static_panel(d, vec2(1.0, -1.0), 1);
}

}  // namespace

TEST_CASE("saturation slack") {
  // n=2, q = (+1,-1): both one-sided sums equal 1
  CHECK(compute_vartheta(pm_panel(1)) == doctest::Approx(1.0).epsilon(1e-15));
  // a state where everyone says +1 kills the slack
  auto table = std::vector<Eigen::VectorXd>{vec2(1.0, 1.0), vec2(0.5, -0.5)};
  ExpertPanel bad(2, 1, 2, table);
  CHECK(compute_vartheta(bad) == doctest::Approx(0.0).epsilon(1e-15));
  // three silent experts contribute one unit each
  Eigen::VectorXd zeros = Eigen::VectorXd::Zero(3);
  CHECK(compute_vartheta(ExpertPanel::static_panel(1, zeros, 1)) ==
        doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("difference table") {
  auto r = compute_r_table(pm_panel(1));
  CHECK(r[0].size() == 1);
  CHECK(r[0][0] == doctest::Approx(2.0));  // 1 - (-1)
  Eigen::VectorXd c = Eigen::VectorXd::Constant(4, 0.25);
  auto rc = compute_r_table(ExpertPanel::static_panel(2, c, 4));
  for (const auto& row : rc) CHECK(row.cwiseAbs().maxCoeff() == 0.0);
  Eigen::VectorXd three(3);
  three << 0.5, -0.5, 0.0;
  auto r3 = compute_r_table(ExpertPanel::static_panel(1, three, 2));
  CHECK(r3[0][0] == doctest::Approx(0.5));
  CHECK(r3[0][1] == doctest::Approx(-0.5));
}

TEST_CASE("covariance matrices") {
  // n=2, d=1, static (+1,-1): r = 2 at both states, A = 8/4
  Eigen::MatrixXd A = compute_A(pm_panel(1));
  CHECK(A.rows() == 1);
  CHECK(A(0, 0) == doctest::Approx(2.0).epsilon(1e-15));

  Eigen::MatrixXd B = compute_B(pm_panel(1));
  CHECK(B(0, 0) == doctest::Approx(0.5));
  CHECK(B(0, 1) == doctest::Approx(-0.5));
  CHECK(B(1, 1) == doctest::Approx(0.5));

  Eigen::VectorXd same = Eigen::VectorXd::Constant(3, 0.5);
  CHECK(compute_A(ExpertPanel::static_panel(2, same, 2)).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK(compute_B(ExpertPanel::static_panel(1, Eigen::VectorXd::Zero(2), 1))
            .cwiseAbs()
            .maxCoeff() == 0.0);

  // two-expert A equals the mean square prediction difference
  ExpertPanel rnd = ExpertPanel::random_panel(2, 3, 8, 42);
  double csharp = 0.0;
  for (std::size_t c = 0; c < rnd.states(); ++c) {
    double diff = rnd.q(static_cast<std::uint32_t>(c))[1] -
                  rnd.q(static_cast<std::uint32_t>(c))[0];
    csharp += diff * diff;
  }
  csharp /= 16.0;  // 2^(d+1)
  CHECK(compute_A(rnd)(0, 0) == doctest::Approx(csharp).epsilon(1e-14));
}

TEST_CASE("diagnostics flags and the covariance implication") {
  PanelDiagnostics diag = diagnose(pm_panel(2));
  CHECK(diag.e1_holds);
  CHECK(diag.e2_holds);
  CHECK(diag.lambda_min_A == doctest::Approx(2.0));
  CHECK(diag.lambda_r == doctest::Approx(1.0));  // capped at one

  // duplicated expert: differences vanish, ellipticity fails
  Eigen::VectorXd dup(2);
  dup << 0.5, 0.5;
  PanelDiagnostics dd = diagnose(ExpertPanel::static_panel(1, dup, 2));
  CHECK(dd.e1_holds);
  CHECK_FALSE(dd.e2_holds);

  // nondegenerate B forces nondegenerate A, with at least the same margin
  for (std::uint64_t seed : {7ull, 8ull, 9ull, 10ull}) {
    for (int n : {2, 3}) {
      PanelDiagnostics dg = diagnose(ExpertPanel::random_panel(n, 2, 8, seed));
      CHECK(dg.A.isApprox(dg.A.transpose(), 1e-14));
      CHECK(dg.lambda_min_A >= -1e-12);
      CHECK(dg.lambda_min_B >= -1e-12);
      if (dg.lambda_min_B > 1e-12)
        CHECK(dg.lambda_min_A >= dg.lambda_min_B - 1e-12);
    }
  }
}

TEST_CASE("A is blind to state relabeling") {
  ExpertPanel p = ExpertPanel::random_panel(3, 2, 8, 99);
  std::vector<Eigen::VectorXd> shuffled;
  for (std::size_t c = 0; c < p.states(); ++c)
    shuffled.push_back(p.q(static_cast<std::uint32_t>((c + 3) % p.states())));
  ExpertPanel relabeled(3, 2, 8, shuffled);
  CHECK(compute_A(p).isApprox(compute_A(relabeled), 1e-15));
}

TEST_CASE("panel file round trip and parse errors") {
  ExpertPanel p = ExpertPanel::random_panel(3, 2, 8, 1234);
  std::stringstream ss;
  p.save(ss);
  ExpertPanel q = ExpertPanel::load(ss);
  CHECK(q.n() == 3);
  CHECK(q.d() == 2);
  CHECK(q.denom() == 8);
  for (std::size_t c = 0; c < p.states(); ++c)
    CHECK(p.q(static_cast<std::uint32_t>(c)) ==
          q.q(static_cast<std::uint32_t>(c)));

  std::stringstream bad1("2 1 2\n+ 0.5 0.5\n+ 0.5 0.5\n");
  CHECK_THROWS_WITH_AS(static_cast<void>(ExpertPanel::load(bad1)),
                       doctest::Contains("line 3"), ParseError);
  std::stringstream bad2("2 1 2\n- 0.5\n+ 0.5 0.5\n");
  CHECK_THROWS_AS(static_cast<void>(ExpertPanel::load(bad2)), ParseError);
  std::stringstream bad3("2 1 2\n- 0.5 2.5\n+ 0.5 0.5\n");
  CHECK_THROWS_AS(static_cast<void>(ExpertPanel::load(bad3)), ParseError);
}

TEST_CASE("panel families stay on the declared grid") {
  ExpertPanel parity = ExpertPanel::parity_panel(
      3, {1u, 2u, 4u}, Eigen::VectorXd::Constant(3, 0.5), 2);
  for (std::size_t c = 0; c < parity.states(); ++c)
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(parity.q(static_cast<std::uint32_t>(c))[j]) == 0.5);
  // parity of a single move flips with that move
  CHECK(parity.q(HistoryState::parse("+--").code())[0] ==
        doctest::Approx(0.5));
  CHECK(parity.q(HistoryState::parse("---").code())[0] ==
        doctest::Approx(-0.5));

  ExpertPanel rnd = ExpertPanel::random_panel(2, 3, 4, 5);
  for (std::size_t c = 0; c < rnd.states(); ++c) {
    const Eigen::VectorXd& row = rnd.q(static_cast<std::uint32_t>(c));
    CHECK_FALSE(row.isApproxToConstant(1.0));
    CHECK_FALSE(row.isApproxToConstant(-1.0));
    for (int j = 0; j < 2; ++j) {
      CHECK(row[j] >= -1.0);
      CHECK(row[j] <= 1.0);
      CHECK(row[j] * 4.0 == doctest::Approx(std::round(row[j] * 4.0)));
    }
  }
}
