#pragma once

// Closed-form CHSH monogamy frontier and the quantities derived from it.
//
// All functions are templated on the real type so the same expressions can
// be evaluated in long double for cross-checks. 8 - s^2 is always formed as
// (2 sqrt2 - s)(2 sqrt2 + s) to keep precision near the Tsirelson endpoint.

#include "shadowcert/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

namespace shadowcert {

template <typename Real = double>
inline constexpr Real kTsirelson = Real(2) * std::numbers::sqrt2_v<Real>;

/// Slack admitted at the ends of [0, 2 sqrt2] for values that went through
/// floating point arithmetic.
inline constexpr double kScoreRangeSlack = 1e-12;

namespace detail {

template <typename Real>
void require_score(Real s, Real lo, const char* what) {
  if (!(s >= lo - Real(kScoreRangeSlack) && s <= kTsirelson<Real> + Real(kScoreRangeSlack)))
    throw DomainError(std::string(what) + ": score outside [" + (lo < 0 ? "-2sqrt2" : "0") + ", 2sqrt2]");
}

template <typename Real>
void require_unit(Real v, const char* what) {
  if (!(v >= Real(0) && v <= Real(1))) throw DomainError(std::string(what) + ": argument outside [0,1]");
}

// 8 - s^2 without cancellation, floored at zero.
template <typename Real>
Real tsirelson_slack(Real s) {
  const Real t = kTsirelson<Real>;
  return std::max(Real(0), (t - s) * (t + s));
}

}  // namespace detail

/// Largest collusive score compatible with authorized score s: sqrt(8 - s^2).
template <typename Real>
Real s13_max(Real s) {
  detail::require_score(s, Real(0), "s13_max");
  return std::sqrt(detail::tsirelson_slack(s));
}

/// Certified anti-collusion power [(s - sqrt(8 - s^2))/8]_+.
template <typename Real>
Real gamma_plus(Real s) {
  detail::require_score(s, Real(0), "gamma_plus");
  return std::max(Real(0), (s - std::sqrt(detail::tsirelson_slack(s))) / Real(8));
}

/// CHSH winning probability 1/2 + s/8.
template <typename Real>
Real omega_from_s(Real s) {
  detail::require_score(s, -kTsirelson<Real>, "omega_from_s");
  return Real(0.5) + s / Real(8);
}

template <typename Real = double>
struct NearTsirelsonBound {
  Real exact;
  Real loose;
};

/// |S13| bound when S12 >= 2 sqrt2 - delta: sqrt(4 sqrt2 delta - delta^2) and
/// the looser 2^{5/4} sqrt(delta).
template <typename Real>
NearTsirelsonBound<Real> near_tsirelson_bound(Real delta) {
  if (!(delta >= Real(0) && delta <= kTsirelson<Real> + Real(kScoreRangeSlack)))
    throw DomainError("near_tsirelson_bound: delta outside [0, 2sqrt2]");
  const Real exact = std::sqrt(std::max(Real(0), delta * (Real(2) * kTsirelson<Real> - delta)));
  const Real loose = std::pow(Real(2), Real(1.25)) * std::sqrt(delta);
  return {exact, loose};
}

/// (2 sqrt2 + 2) sqrt(eps): trace-norm distance of any extension from the
/// decoupled state when the authorized pair has fidelity >= 1 - eps.
template <typename Real>
Real robust_decoupling_bound(Real eps) {
  detail::require_unit(eps, "robust_decoupling_bound");
  return (kTsirelson<Real> + Real(2)) * std::sqrt(eps);
}

/// 2 sqrt(alpha) + alpha.
template <typename Real>
Real gentle_bound(Real alpha) {
  detail::require_unit(alpha, "gentle_bound");
  return Real(2) * std::sqrt(alpha) + alpha;
}

/// (1 + lambda) * trace_dist bounds the change of U_lambda = A - lambda C.
template <typename Real>
Real payoff_norm_bound(Real lambda, Real trace_dist) {
  if (!(lambda >= Real(0)) || !(trace_dist >= Real(0)))
    throw DomainError("payoff_norm_bound: arguments must be nonnegative");
  return (Real(1) + lambda) * trace_dist;
}

enum class Regime { BelowLocal, Certified };

inline const char* to_string(Regime r) { return r == Regime::BelowLocal ? "below_local" : "certified"; }

struct AnalyticProvenance {};

struct FiniteDataProvenance {
  double confidence = 0.0;
  std::uint64_t n_min = 0;
};

using Provenance = std::variant<AnalyticProvenance, FiniteDataProvenance>;

template <typename Real = double>
struct CertificateRecord {
  Real s12;
  Real s13_max;
  Real omega12;
  Real omega13_max;
  Real gamma_plus;
  Regime regime;
  Provenance provenance;
};

/// The four-step score certification: frontier, collusive winning bound and
/// certified power. Rejects s outside [0, 2 sqrt2] instead of clipping.
template <typename Real>
CertificateRecord<Real> certify(Real s12, Provenance provenance = AnalyticProvenance{}) {
  detail::require_score(s12, Real(0), "certify");
  const Real s13 = s13_max(s12);
  return CertificateRecord<Real>{s12,
                                 s13,
                                 omega_from_s(s12),
                                 Real(0.5) + s13 / Real(8),
                                 gamma_plus(s12),
                                 s12 > Real(2) ? Regime::Certified : Regime::BelowLocal,
                                 provenance};
}

template <typename Real = double>
struct WernerRecord {
  Real eta;
  Real s12;
  Real a12;
  Real c13_max_bound;
  Real gap;
};

/// Score-certified quantities for the Werner state at visibility eta.
template <typename Real>
WernerRecord<Real> werner_record(Real eta) {
  detail::require_unit(eta, "werner_record");
  const Real r = Real(1) / kTsirelson<Real>;
  const Real a12 = Real(0.5) + eta * r;
  const Real c13 = Real(0.5) + std::sqrt(std::max(Real(0), (Real(1) - eta) * (Real(1) + eta))) * r;
  return WernerRecord<Real>{eta, kTsirelson<Real> * eta, a12, c13, std::max(Real(0), a12 - c13)};
}

template <typename Real>
std::vector<WernerRecord<Real>> werner_scan(const std::vector<Real>& etas) {
  std::vector<WernerRecord<Real>> out;
  out.reserve(etas.size());
  for (Real eta : etas) out.push_back(werner_record(eta));
  return out;
}

/// `points` evenly spaced values from lo to hi inclusive.
template <typename Real>
std::vector<Real> linspace(Real lo, Real hi, int points) {
  if (points < 2) throw DomainError("linspace: need at least two points");
  std::vector<Real> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * Real(i) / Real(points - 1);
  out.back() = hi;
  return out;
}

}  // namespace shadowcert
