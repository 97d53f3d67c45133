#include "shadowcert/frontier.hpp"

#include <doctest.h>

#include <numbers>

using namespace shadowcert;

namespace {

const double kTs = 2.0 * std::numbers::sqrt2;

// 8 - s^2 evaluated naively in long double
long double ref_s13(long double s) { return std::sqrt(std::max(0.0L, 8.0L - s * s)); }
long double ref_gamma(long double s) { return std::max(0.0L, (s - ref_s13(s)) / 8.0L); }

}  // namespace

TEST_SUITE("frontier") {

TEST_CASE("gamma plus endpoints") {
  CHECK(std::abs(gamma_plus(kTs) - 1.0 / kTs) < 1e-12);
  CHECK(gamma_plus(2.0) == 0.0);
  CHECK(gamma_plus(0.0) == 0.0);
  for (int i = 0; i <= 200; ++i) CHECK(gamma_plus(2.0 * i / 200.0) == 0.0);
  CHECK_THROWS_AS(gamma_plus(3.0), DomainError);
  CHECK_THROWS_AS(gamma_plus(-0.1), DomainError);
}

TEST_CASE("s13 max") {
  CHECK(s13_max(2.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s13_max(kTs) == 0.0);
  CHECK(s13_max(0.0) == doctest::Approx(kTs).epsilon(1e-15));
  for (int i = 0; i <= 1000; ++i) {
    const double s = kTs * i / 1000.0;
    CHECK(std::abs(s13_max(s) - static_cast<double>(ref_s13(s))) < 1e-12);
  }
}

TEST_CASE("omega from s") {
  CHECK(omega_from_s(kTs) == doctest::Approx(std::pow(std::cos(std::numbers::pi / 8), 2)).epsilon(1e-15));
  CHECK(omega_from_s(0.0) == 0.5);
  CHECK(omega_from_s(2.0) == 0.75);
  CHECK(omega_from_s(-kTs) == doctest::Approx(1.0 - std::pow(std::cos(std::numbers::pi / 8), 2)));
}

TEST_CASE("certify") {
  const auto c = certify(2.5);
  CHECK(c.s13_max == doctest::Approx(std::sqrt(1.75)).epsilon(1e-14));
  CHECK(c.omega13_max == doctest::Approx(0.5 + std::sqrt(1.75) / 8).epsilon(1e-14));
  CHECK(std::abs(c.gamma_plus - static_cast<double>(ref_gamma(2.5L))) < 1e-15);
  CHECK(c.gamma_plus == doctest::Approx(0.14714).epsilon(1e-4));
  CHECK(c.regime == Regime::Certified);
  const auto b = certify(2.0);
  CHECK(b.regime == Regime::BelowLocal);
  CHECK(b.gamma_plus == 0.0);
  CHECK(std::abs(certify(kTs).gamma_plus - 1.0 / kTs) < 1e-12);
  CHECK_THROWS_AS(certify(3.0), DomainError);
}

TEST_CASE("gamma plus is monotone and strictly increasing past the local bound") {
  const auto grid = linspace(0.0, kTs, 1000);
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(gamma_plus(grid[i]) >= gamma_plus(grid[i - 1]));
  const auto upper = linspace(2.0, kTs, 1000);
  for (std::size_t i = 1; i < upper.size(); ++i) CHECK(gamma_plus(upper[i]) > gamma_plus(upper[i - 1]));
}

TEST_CASE("protocol decomposition") {
  for (double s : linspace(0.0, kTs, 500)) {
    const double decomposed = std::max(0.0, omega_from_s(s) - (0.5 + s13_max(s) / 8));
    CHECK(std::abs(gamma_plus(s) - decomposed) < 1e-14);
    CHECK(std::abs(gamma_plus(s) - static_cast<double>(ref_gamma(s))) < 1e-12);
  }
}

TEST_CASE("werner scan") {
  const auto rows = werner_scan(std::vector<double>{0.0, 0.5, 1.0 / std::numbers::sqrt2, 0.9, 1.0});
  CHECK(rows[0].gap == 0.0);
  CHECK(rows[1].gap == 0.0);
  CHECK(rows[2].gap < 1e-15);
  CHECK(rows[3].gap == doctest::Approx((0.9 - std::sqrt(0.19)) / kTs).epsilon(1e-13));
  CHECK(rows[3].gap == doctest::Approx(0.16409).epsilon(1e-4));
  CHECK(std::abs(rows[4].gap - 1.0 / kTs) < 1e-15);
  for (const auto& r : werner_scan(linspace(0.0, 1.0, 400))) {
    CHECK(r.a12 == doctest::Approx(0.5 + r.eta / kTs).epsilon(1e-15));
    CHECK(std::abs(r.gap - gamma_plus(std::min(kTs, kTs * r.eta))) < 1e-14);
  }
  CHECK_THROWS_AS(werner_record(1.2), DomainError);
}

TEST_CASE("near tsirelson bound") {
  const auto zero = near_tsirelson_bound(0.0);
  CHECK(zero.exact == 0.0);
  CHECK(zero.loose == 0.0);
  CHECK(near_tsirelson_bound(kTs).exact == doctest::Approx(kTs).epsilon(1e-14));
  for (double d : linspace(0.0, kTs, 300)) {
    const auto b = near_tsirelson_bound(d);
    CHECK(b.exact <= b.loose + 1e-15);
    CHECK(std::abs(b.exact - s13_max(std::max(0.0, kTs - d))) < 1e-12);
  }
}

TEST_CASE("robustness bounds") {
  CHECK(robust_decoupling_bound(0.0) == 0.0);
  CHECK(robust_decoupling_bound(1.0) == doctest::Approx(kTs + 2.0));
  CHECK(robust_decoupling_bound(0.01) == doctest::Approx(0.48284).epsilon(1e-5));
  CHECK(gentle_bound(0.0) == 0.0);
  CHECK(gentle_bound(0.04) == doctest::Approx(0.44));
  CHECK(gentle_bound(1.0) == doctest::Approx(3.0));
  CHECK(payoff_norm_bound(1.0, 0.1) == doctest::Approx(0.2));
  CHECK(payoff_norm_bound(0.0, 0.37) == doctest::Approx(0.37));
  CHECK(payoff_norm_bound(1.0, robust_decoupling_bound(0.01)) == doctest::Approx(2 * 0.48284271).epsilon(1e-8));
  CHECK_THROWS_AS(gentle_bound(2.0), DomainError);
  CHECK_THROWS_AS(payoff_norm_bound(-1.0, 0.1), DomainError);
}

TEST_CASE("linspace") {
  const auto g = linspace(2.0, 3.0, 5);
  CHECK(g.size() == 5);
  CHECK(g.front() == 2.0);
  CHECK(g.back() == 3.0);
  CHECK(g[2] == 2.5);
  CHECK_THROWS_AS(linspace(0.0, 1.0, 1), DomainError);
}

TEST_CASE("long double instantiation") {
  const long double t = kTsirelson<long double>;
  CHECK(std::abs(gamma_plus(t) - 1.0L / t) < 1e-18L);
  CHECK(std::abs(s13_max(2.0L) - 2.0L) < 1e-18L);
}

}  // TEST_SUITE
