#pragma once

#include "shadowcert/behaviors.hpp"
#include "shadowcert/qkernel.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace shadowcert {

/// One CHSH round: setting bits x, y and outcomes a, b in {-1, +1}.
struct Trial {
  std::uint8_t x = 0;
  std::uint8_t y = 0;
  std::int8_t a = 1;
  std::int8_t b = 1;

  friend bool operator==(const Trial&, const Trial&) = default;
};

/// Identifier of the sampling algorithm recorded with every simulated batch.
inline constexpr const char* kTrialGenerator = "mt19937_64+splitmix64-seed/v1";

struct TrialBatch {
  std::vector<Trial> trials;
  std::uint64_t seed = 0;
  std::string source;
  std::string generator;

  /// Throws `InvariantError` on settings outside {0,1} or outcomes outside {-1,+1}.
  void validate() const;
};

struct CorrelatorStats {
  std::array<std::array<double, 2>, 2> e_hat{};
  std::array<std::array<std::uint64_t, 2>, 2> n{};
  std::uint64_t n_min = 0;
  double s_hat = 0.0;
};

enum class Estimator { CorrelatorWise, SingleTrial };

inline const char* to_string(Estimator e) {
  return e == Estimator::CorrelatorWise ? "correlator_wise" : "single_trial";
}

struct FiniteDataCertificate {
  double s_hat = 0.0;
  double radius = 0.0;
  double s_lcb = 0.0;
  double s_cert = 0.0;
  double gamma_lcb = 0.0;
  double confidence = 0.0;
  std::uint64_t n_min = 0;
  Estimator estimator = Estimator::CorrelatorWise;
};

/// Data source for simulation: a two-party quantum strategy or LHV model,
/// each with two binary settings per party.
using TrialSource = std::variant<QuantumStrategy, LhvModel>;

/// SplitMix64 step; used to derive independent child seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed of the `index`-th independent stream derived from `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// n i.i.d. rounds with uniform settings, outcomes drawn from the source's
/// two-party behavior. Deterministic in (source, n, seed).
TrialBatch simulate_trials(const TrialSource& source, std::uint64_t n, std::uint64_t seed,
                           std::string description = {});

/// Per-setting empirical correlators. Throws `EmptyCellError` if any
/// setting pair has no trials.
CorrelatorStats estimate_correlators(const TrialBatch& batch);

/// 4 sqrt(2 ln(8/alpha) / n_min).
double hoeffding_radius(std::uint64_t n_min, double alpha);

/// 4 sqrt(2 ln(1/alpha) / n) for the single-trial estimator.
double single_trial_radius(std::uint64_t n, double alpha);

/// min(2 sqrt2, max(0, s)).
double clip_score(double s);

/// Correlator-wise certificate: s_lcb = s_hat - radius, clipped, mapped by Gamma+.
FiniteDataCertificate lower_confidence_bound(const CorrelatorStats& stats, double alpha);

/// Certificate from the unbiased single-trial estimator Z = 4 (-1)^{xy} a b.
FiniteDataCertificate single_trial_lcb(const TrialBatch& batch, double alpha);

/// Smallest n_min with s_lcb > 2 when the estimate equals s_true:
/// ceil(32 ln(8/alpha) / (s_true - 2)^2).
std::uint64_t samples_for_onset(double s_true, double alpha);

}  // namespace shadowcert
