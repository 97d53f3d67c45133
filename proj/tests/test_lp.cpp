#include "shadowcert/lp.hpp"
#include "shadowcert/random.hpp"

#include <doctest.h>

#include <functional>
#include <optional>

using namespace shadowcert;

namespace {

// max c'x over {Ax = b, x >= 0} by enumerating every basis.
std::optional<double> vertex_enumeration(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  const int m = static_cast<int>(a.rows()), n = static_cast<int>(a.cols());
  std::optional<double> best;
  std::vector<int> pick(static_cast<std::size_t>(m));
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == m) {
      Eigen::MatrixXd basis(m, m);
      for (int k = 0; k < m; ++k) basis.col(k) = a.col(pick[static_cast<std::size_t>(k)]);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
      if (lu.rank() < m) return;
      const Eigen::VectorXd xb = lu.solve(b);
      if (xb.minCoeff() < -1e-10) return;
      double v = 0.0;
      for (int k = 0; k < m; ++k) v += c(pick[static_cast<std::size_t>(k)]) * xb(k);
      if (!best || v > *best) best = v;
      return;
    }
    for (int j = start; j < n; ++j) {
      pick[static_cast<std::size_t>(depth)] = j;
      rec(j + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

}  // namespace

TEST_SUITE("lp") {

TEST_CASE("one variable") {
  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Ones(1);
  lp.ub_matrix = Eigen::MatrixXd::Ones(1, 1);
  lp.ub_rhs = Eigen::VectorXd::Ones(1);
  const auto r = lp_solve(lp);
  REQUIRE(r.optimal());
  CHECK(r.optimum == doctest::Approx(1.0));
  CHECK(r.primal(0) == doctest::Approx(1.0));
}

TEST_CASE("infeasible and unbounded") {
  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Ones(2);
  lp.eq_matrix = Eigen::MatrixXd::Ones(1, 2);
  lp.eq_rhs = Eigen::VectorXd::Constant(1, -1.0);
  CHECK(lp_solve(lp).status == LpStatus::Infeasible);
  LinearProgram open;
  open.objective = Eigen::VectorXd::Ones(2);
  open.ub_matrix = Eigen::MatrixXd(1, 2);
  open.ub_matrix << 1.0, -1.0;
  open.ub_rhs = Eigen::VectorXd::Zero(1);
  CHECK(lp_solve(open).status == LpStatus::Unbounded);
}

TEST_CASE("bounds and free variables") {
  // max x - y  s.t. x + y = 1, -2 <= y <= 3, x free
  LinearProgram lp;
  lp.objective = Eigen::Vector2d(1.0, -1.0);
  lp.eq_matrix = Eigen::RowVector2d(1.0, 1.0);
  lp.eq_rhs = Eigen::VectorXd::Ones(1);
  lp.lower = Eigen::Vector2d(-kInfinity, -2.0);
  lp.upper = Eigen::Vector2d(kInfinity, 3.0);
  const auto r = lp_solve(lp);
  REQUIRE(r.optimal());
  CHECK(r.optimum == doctest::Approx(5.0));
  CHECK(r.primal(1) == doctest::Approx(-2.0));
  CHECK(r.primal_residual < 1e-12);
}

TEST_CASE("shape errors") {
  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Ones(2);
  lp.eq_matrix = Eigen::MatrixXd::Ones(1, 3);
  lp.eq_rhs = Eigen::VectorXd::Ones(1);
  CHECK_THROWS_AS(lp_solve(lp), DimensionError);
}

TEST_CASE("random LPs against vertex enumeration") {
  auto gen = make_engine(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int solved = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int m = 2 + trial % 3, n = 6 + trial % 3;
    Eigen::MatrixXd a(m, n);
    for (Eigen::Index k = 0; k < a.size(); ++k) a.data()[k] = u(gen);
    // a box-like row keeps the feasible set bounded
    a.row(0) = a.row(0).cwiseAbs().array() + 0.1;
    const Eigen::VectorXd x0 = random_simplex(gen, n) * 3.0;
    const Eigen::VectorXd b = trial % 5 == 0 ? Eigen::VectorXd(-Eigen::VectorXd::Ones(m)) : Eigen::VectorXd(a * x0);
    Eigen::VectorXd c(n);
    for (auto& v : c) v = u(gen);
    LinearProgram lp;
    lp.objective = c;
    lp.eq_matrix = a;
    lp.eq_rhs = b;
    const auto r = lp_solve(lp);
    const auto ref = vertex_enumeration(a, b, c);
    if (!ref) {
      CHECK(r.status == LpStatus::Infeasible);
      continue;
    }
    REQUIRE(r.optimal());
    ++solved;
    CHECK(std::abs(r.optimum - *ref) < 1e-9);
    CHECK(r.duality_gap < 1e-8);
    CHECK(r.primal_residual < 1e-9);
    CHECK(r.dual_infeasibility < 1e-9);
  }
  CHECK(solved >= 40);
}

TEST_CASE("inequality form matches slack form") {
  auto gen = make_engine(22);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 3, n = 4;
    Eigen::MatrixXd a(m, n);
    for (Eigen::Index k = 0; k < a.size(); ++k) a.data()[k] = u(gen) + 0.05;
    const Eigen::VectorXd b = Eigen::VectorXd::Ones(m);
    Eigen::VectorXd c(n);
    for (auto& v : c) v = u(gen) - 0.3;
    LinearProgram lp;
    lp.objective = c;
    lp.ub_matrix = a;
    lp.ub_rhs = b;
    const auto r = lp_solve(lp);
    REQUIRE(r.optimal());
    Eigen::MatrixXd slack(m, n + m);
    slack << a, Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd cs = Eigen::VectorXd::Zero(n + m);
    cs.head(n) = c;
    CHECK(std::abs(r.optimum - *vertex_enumeration(slack, b, cs)) < 1e-10);
    CHECK(r.dual_ub.minCoeff() >= -1e-12);
    // strong duality: b'y equals the optimum
    CHECK(std::abs(b.dot(r.dual_ub) - r.optimum) < 1e-9);
  }
}

TEST_CASE("degenerate redundant equalities") {
  // duplicated rows leave an artificial basic at zero
  LinearProgram lp;
  lp.objective = Eigen::Vector3d(1.0, 2.0, 0.0);
  lp.eq_matrix = Eigen::MatrixXd(3, 3);
  lp.eq_matrix << 1, 1, 1, 1, 1, 1, 2, 2, 2;
  lp.eq_rhs = Eigen::Vector3d(1.0, 1.0, 2.0);
  const auto r = lp_solve(lp);
  REQUIRE(r.optimal());
  CHECK(r.optimum == doctest::Approx(2.0));
}

}  // TEST_SUITE
