#include "shadowcert/finitedata.hpp"

#include "shadowcert/errors.hpp"
#include "shadowcert/frontier.hpp"

#include <cmath>
#include <random>

namespace shadowcert {

void TrialBatch::validate() const {
  for (const auto& t : trials) {
    if (t.x > 1 || t.y > 1) throw InvariantError("trial: settings must be 0 or 1");
    if ((t.a != 1 && t.a != -1) || (t.b != 1 && t.b != -1)) throw InvariantError("trial: outcomes must be -1 or +1");
  }
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t state = seed ^ (0xd1b54a32d192ed03ULL * (index + 1));
  splitmix64(state);
  return splitmix64(state);
}

namespace {

Behavior source_behavior(const TrialSource& source) {
  Behavior p = std::visit(
      [](const auto& s) -> Behavior {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, QuantumStrategy>)
          return born_behavior(s);
        else
          return lhv_behavior(s);
      },
      source);
  if (p.parties() != 2 || p.inputs() != std::vector<int>{2, 2} || p.outputs() != std::vector<int>{2, 2})
    throw DimensionError("simulate_trials: source must be a two-party binary-input binary-output strategy");
  return p;
}

// 53-bit uniform double in [0,1); fixed so batches are portable across
// standard library implementations.
double unit_uniform(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

}  // namespace

TrialBatch simulate_trials(const TrialSource& source, std::uint64_t n, std::uint64_t seed, std::string description) {
  if (n < 1) throw DomainError("simulate_trials: n must be >= 1");
  const Behavior p = source_behavior(source);
  std::uint64_t state = seed;
  std::mt19937_64 gen(splitmix64(state));

  TrialBatch batch;
  batch.seed = seed;
  batch.source = std::move(description);
  batch.generator = kTrialGenerator;
  batch.trials.reserve(static_cast<std::size_t>(n));
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t bits = gen();
    const int x = static_cast<int>(bits & 1);
    const int y = static_cast<int>((bits >> 1) & 1);
    const auto row = static_cast<Eigen::Index>(2 * x + y);
    const double u = unit_uniform(gen);
    double acc = 0.0;
    int cell = 3;
    for (int c = 0; c < 4; ++c) {
      acc += p.table()(row, c);
      if (u < acc) {
        cell = c;
        break;
      }
    }
    // label 0 is the +1 outcome
    batch.trials.push_back(Trial{static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y),
                                 static_cast<std::int8_t>((cell >> 1) == 0 ? 1 : -1),
                                 static_cast<std::int8_t>((cell & 1) == 0 ? 1 : -1)});
  }
  return batch;
}

CorrelatorStats estimate_correlators(const TrialBatch& batch) {
  batch.validate();
  CorrelatorStats st;
  std::array<std::array<std::int64_t, 2>, 2> sums{};
  for (const auto& t : batch.trials) {
    ++st.n[t.x][t.y];
    sums[t.x][t.y] += t.a * t.b;
  }
  st.n_min = st.n[0][0];
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      if (st.n[x][y] == 0)
        throw EmptyCellError("no trials for setting pair (" + std::to_string(x) + "," + std::to_string(y) + ")");
      st.e_hat[x][y] = static_cast<double>(sums[x][y]) / static_cast<double>(st.n[x][y]);
      st.n_min = std::min(st.n_min, st.n[x][y]);
    }
  st.s_hat = st.e_hat[0][0] + st.e_hat[0][1] + st.e_hat[1][0] - st.e_hat[1][1];
  return st;
}

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
}

FiniteDataCertificate finish(double s_hat, double radius, double alpha, std::uint64_t n_min, Estimator e) {
  FiniteDataCertificate c;
  c.s_hat = s_hat;
  c.radius = radius;
  c.s_lcb = s_hat - radius;
  c.s_cert = clip_score(c.s_lcb);
  c.gamma_lcb = gamma_plus(c.s_cert);
  c.confidence = 1.0 - alpha;
  c.n_min = n_min;
  c.estimator = e;
  return c;
}

}  // namespace

double hoeffding_radius(std::uint64_t n_min, double alpha) {
  require_alpha(alpha);
  if (n_min < 1) throw DomainError("hoeffding_radius: n_min must be >= 1");
  return 4.0 * std::sqrt(2.0 * std::log(8.0 / alpha) / static_cast<double>(n_min));
}

double single_trial_radius(std::uint64_t n, double alpha) {
  require_alpha(alpha);
  if (n < 1) throw DomainError("single_trial_radius: n must be >= 1");
  return 4.0 * std::sqrt(2.0 * std::log(1.0 / alpha) / static_cast<double>(n));
}

double clip_score(double s) { return std::min(kTsirelson<double>, std::max(0.0, s)); }

FiniteDataCertificate lower_confidence_bound(const CorrelatorStats& stats, double alpha) {
  return finish(stats.s_hat, hoeffding_radius(stats.n_min, alpha), alpha, stats.n_min, Estimator::CorrelatorWise);
}

FiniteDataCertificate single_trial_lcb(const TrialBatch& batch, double alpha) {
  batch.validate();
  if (batch.trials.empty()) throw DomainError("single_trial_lcb: empty batch");
  std::int64_t sum = 0;
  for (const auto& t : batch.trials) sum += ((t.x & t.y) ? -4 : 4) * t.a * t.b;
  const auto n = static_cast<std::uint64_t>(batch.trials.size());
  const double s_hat = static_cast<double>(sum) / static_cast<double>(n);
  return finish(s_hat, single_trial_radius(n, alpha), alpha, n, Estimator::SingleTrial);
}

std::uint64_t samples_for_onset(double s_true, double alpha) {
  require_alpha(alpha);
  if (!(s_true > 2.0)) throw DomainError("samples_for_onset: onset unreachable for s_true <= 2");
  const double excess = s_true - 2.0;
  return static_cast<std::uint64_t>(std::ceil(32.0 * std::log(8.0 / alpha) / (excess * excess)));
}

}  // namespace shadowcert
