#include "shadowcert/finitedata.hpp"
#include "shadowcert/frontier.hpp"
#include "shadowcert/random.hpp"

#include <doctest.h>

#include <numbers>

using namespace shadowcert;

namespace {

const double kTs = 2.0 * std::numbers::sqrt2;

TrialBatch batch_of(std::vector<Trial> trials) {
  TrialBatch b;
  b.trials = std::move(trials);
  return b;
}

LhvModel uniform_model() {
  LhvModel m;
  m.weights = Eigen::VectorXd::Ones(1);
  m.responses = {{Eigen::MatrixXd::Constant(2, 2, 0.5)}, {Eigen::MatrixXd::Constant(2, 2, 0.5)}};
  return m;
}

// smallest n with 4 sqrt(2 ln(8/alpha) / n) < s - 2, by direct search
std::uint64_t onset_by_search(long double s, long double alpha) {
  std::uint64_t n = 1;
  auto ok = [&](std::uint64_t k) { return s - 4.0L * std::sqrt(2.0L * std::log(8.0L / alpha) / k) > 2.0L; };
  while (!ok(n)) n *= 2;
  std::uint64_t lo = n / 2, hi = n;
  while (hi - lo > 1) {
    const auto mid = (lo + hi) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

TEST_SUITE("finitedata") {

TEST_CASE("simulated Bell batches approach Tsirelson") {
  const auto batch = simulate_trials(bell_strategy(), 1000000, 42, "bell");
  const auto st = estimate_correlators(batch);
  CHECK(std::abs(st.s_hat - kTs) < 0.02);
  CHECK(batch.generator == std::string(kTrialGenerator));
  const auto z = single_trial_lcb(batch, 0.01);
  CHECK(std::abs(z.s_hat - kTs) < 0.05);
}

TEST_CASE("uniform model correlators vanish") {
  for (std::uint64_t n : {400u, 4000u, 40000u}) {
    const auto st = estimate_correlators(simulate_trials(uniform_model(), n, 7));
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) CHECK(std::abs(st.e_hat[x][y]) < 4.0 / std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("simulation is deterministic in the seed") {
  const auto a = simulate_trials(bell_strategy(), 5000, 3);
  const auto b = simulate_trials(bell_strategy(), 5000, 3);
  const auto c = simulate_trials(bell_strategy(), 5000, 4);
  CHECK(a.trials == b.trials);
  CHECK(a.trials != c.trials);
  const auto ca = lower_confidence_bound(estimate_correlators(a), 0.05);
  const auto cb = lower_confidence_bound(estimate_correlators(b), 0.05);
  CHECK(ca.s_lcb == cb.s_lcb);
  CHECK(ca.gamma_lcb == cb.gamma_lcb);
}

TEST_CASE("estimator on constructed batches") {
  std::vector<Trial> same, opposite;
  for (std::uint8_t x = 0; x < 2; ++x)
    for (std::uint8_t y = 0; y < 2; ++y)
      for (int k = 0; k < 3; ++k) {
        same.push_back({x, y, 1, 1});
        same.push_back({x, y, -1, -1});
        opposite.push_back({x, y, 1, -1});
      }
  const auto s = estimate_correlators(batch_of(same));
  const auto o = estimate_correlators(batch_of(opposite));
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      CHECK(s.e_hat[x][y] == 1.0);
      CHECK(o.e_hat[x][y] == -1.0);
    }
  CHECK(s.s_hat == 2.0);
  CHECK(s.n_min == 6);
  CHECK(o.n_min == 3);
  // a missing cell is refused
  std::vector<Trial> holes{{0, 0, 1, 1}, {0, 1, 1, 1}, {1, 0, 1, 1}};
  CHECK_THROWS_AS(estimate_correlators(batch_of(holes)), EmptyCellError);
  CHECK_THROWS_AS(batch_of({{2, 0, 1, 1}}).validate(), InvariantError);
  CHECK_THROWS_AS(batch_of({{0, 0, 0, 1}}).validate(), InvariantError);
}

TEST_CASE("hoeffding radius") {
  CHECK(hoeffding_radius(25000, 0.01) == doctest::Approx(0.09250).epsilon(5e-4 / 0.0925));
  CHECK(hoeffding_radius(1000000, 0.01) == doctest::Approx(0.01463).epsilon(1e-3));
  for (std::uint64_t n : {100u, 1000u, 12345u}) {
    const long double ref = 4.0L * std::sqrt(2.0L * std::log(800.0L) / n);
    CHECK(std::abs(hoeffding_radius(n, 0.01) - static_cast<double>(ref)) < 1e-14);
  }
  double prev = hoeffding_radius(1, 0.05);
  for (std::uint64_t n = 2; n < 5000; n += 7) {
    const double r = hoeffding_radius(n, 0.05);
    CHECK(r < prev);
    prev = r;
  }
  CHECK_THROWS_AS(hoeffding_radius(0, 0.01), DomainError);
  CHECK_THROWS_AS(hoeffding_radius(10, 1.5), DomainError);
}

TEST_CASE("single trial radius") {
  const long double ref = 4.0L * std::sqrt(2.0L * std::log(100.0L) / 1e5L);
  CHECK(std::abs(single_trial_radius(100000, 0.01) - static_cast<double>(ref)) < 1e-14);
  CHECK(single_trial_radius(100000, 0.01) == doctest::Approx(0.03839).epsilon(1e-3));
}

TEST_CASE("worked finite-data example") {
  CorrelatorStats st;
  st.s_hat = 2.65;
  st.n_min = 25000;
  const auto c = lower_confidence_bound(st, 0.01);
  CHECK(std::abs(c.radius - 0.09250) < 5e-4);
  CHECK(std::abs(c.s_lcb - 2.5575) < 1e-3);
  CHECK(std::abs(c.gamma_lcb - 0.1687) < 1e-3);
  CHECK(c.confidence == doctest::Approx(0.99));
  CHECK(c.estimator == Estimator::CorrelatorWise);
}

TEST_CASE("lower confidence bound clipping") {
  CorrelatorStats low;
  low.s_hat = 1.0;
  low.n_min = 1000000;
  CHECK(lower_confidence_bound(low, 0.01).gamma_lcb == 0.0);
  CorrelatorStats high;
  high.s_hat = 3.5;
  high.n_min = 100000000;
  const auto c = lower_confidence_bound(high, 0.01);
  CHECK(c.s_cert == kTs);
  CHECK(std::abs(c.gamma_lcb - 1.0 / kTs) < 1e-12);
  for (double x : {-1.0, 0.0, 1.5, 2.9, 4.0}) CHECK(clip_score(clip_score(x)) == clip_score(x));
  CHECK(clip_score(-1.0) == 0.0);
  CHECK(clip_score(4.0) == kTs);
}

TEST_CASE("samples for onset") {
  CHECK(samples_for_onset(2.65, 0.01) == 507);
  CHECK(samples_for_onset(2.65, 0.01) == onset_by_search(2.65L, 0.01L));
  CHECK(samples_for_onset(2.1, 0.01) == onset_by_search(2.1L, 0.01L));
  CHECK(samples_for_onset(2.1, 0.01) == 21391);
  CHECK(samples_for_onset(2.01, 0.01) > samples_for_onset(2.1, 0.01));
  CHECK_THROWS_AS(samples_for_onset(2.0, 0.01), DomainError);
  // the returned count does reach the onset
  const auto n = samples_for_onset(2.3, 0.05);
  CHECK(2.3 - hoeffding_radius(n, 0.05) > 2.0);
  CHECK(2.3 - hoeffding_radius(n - 1, 0.05) <= 2.0);
}

TEST_CASE("coverage and pathwise monotonicity") {
  const int batches = 400;
  int covered = 0;
  for (int i = 0; i < batches; ++i) {
    const auto batch = simulate_trials(bell_strategy(), 2000, derive_seed(2024, static_cast<std::uint64_t>(i)));
    const auto c = lower_confidence_bound(estimate_correlators(batch), 0.05);
    if (c.s_lcb <= kTs) {
      ++covered;
      CHECK(c.gamma_lcb <= gamma_plus(kTs) + 1e-15);
    }
  }
  CHECK(covered >= static_cast<int>(0.95 * batches));
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(5, 9) == derive_seed(5, 9));
  std::uint64_t s = 0;
  // splitmix64 reference output for state 0
  CHECK(splitmix64(s) == 0xe220a8397b1dcdafULL);
}

}  // TEST_SUITE
