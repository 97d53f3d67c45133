#pragma once

// Level-2 moment-matrix relaxation for tilted-CHSH collusive vulnerability.
//
// Three parties A, B, C with two binary observables each. Moments are
// real symmetrized: a word and its adjoint share one variable.

#include "shadowcert/sdp.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace shadowcert {

enum class NpaParty : std::uint8_t { A = 0, B = 1, C = 2 };

struct Letter {
  NpaParty party;
  std::uint8_t setting;

  auto operator<=>(const Letter&) const = default;
};

/// Operator product, left to right. Empty = identity.
using Word = std::vector<Letter>;

std::string to_string(const Word& w);
/// Parses "I" or concatenations like "A0B1"; throws `ParseError`.
Word parse_word(const std::string& text);

/// Reverses the letter order.
Word adjoint(const Word& w);

struct CanonicalWord {
  Word word;
  bool adjoint_flipped = false;
};

/// Sorts letters by party (stable within a party), cancels adjacent equal
/// letters, repeats until nothing changes, then keeps the lexicographically
/// smaller of the word and its adjoint.
CanonicalWord canonicalize(const Word& w);

/// Level 1: identity and the six singletons. Level 2 adds A0A1, B0B1, C0C1
/// and all twelve two-party products (22 words).
std::vector<Word> build_word_set(int level = 2);

/// Entry map of the moment matrix: entry(u,v) = id of canonical(u^dagger v).
/// Variable 0 is always the identity.
class MomentStructure {
 public:
  explicit MomentStructure(int level = 2);

  int level() const { return level_; }
  const std::vector<Word>& words() const { return words_; }
  const std::vector<Word>& variables() const { return variables_; }
  /// True when the variable's word equals its own adjoint.
  bool self_adjoint(int id) const { return self_adjoint_[static_cast<std::size_t>(id)]; }
  const Eigen::MatrixXi& entry() const { return entry_; }
  int size() const { return static_cast<int>(words_.size()); }
  int variable_count() const { return static_cast<int>(variables_.size()); }

  /// Variable id of canonical(w), or nullopt when it does not occur.
  std::optional<int> find(const Word& w) const;
  int at(const std::string& word) const;

  /// Gamma(y) for a full moment vector (y(0) is the identity moment).
  Eigen::MatrixXd moment_matrix(const Eigen::VectorXd& moments) const;

 private:
  int level_;
  std::vector<Word> words_;
  std::vector<Word> variables_;
  std::vector<bool> self_adjoint_;
  Eigen::MatrixXi entry_;
};

/// Tilted-CHSH functional between party A and `other` (B or C):
/// alpha<A0> + <A0X0> + <A0X1> + <A1X0> - <A1X1>, as variable coefficients.
Eigen::VectorXd tilted_chsh(const MomentStructure& st, double alpha, NpaParty other);

/// Classical and quantum maxima of the tilted-CHSH expression.
double tilted_classical_bound(double alpha);
double tilted_quantum_bound(double alpha);

struct MomentProblem {
  std::shared_ptr<const MomentStructure> structure;
  double alpha = 0.0;
  double s = 0.0;
  /// maximize objective . y  s.t.  authorized . y >= s,  Gamma(y) psd,  y(0) = 1
  Eigen::VectorXd objective;
  Eigen::VectorXd authorized;
};

/// Requires 0 <= alpha <= 2 and s <= tilted_quantum_bound(alpha) + 1e-9;
/// throws `DomainError` otherwise.
MomentProblem assemble(double alpha, double s, int level = 2);
MomentProblem assemble(std::shared_ptr<const MomentStructure> structure, double alpha, double s);

/// Standard-form SDP whose dual slack is blockdiag(Gamma(y), authorized.y - s).
SdpProblem to_sdp(const MomentProblem& problem);

struct CertificateTolerances {
  double gap = 1e-6;
  double residual = 1e-5;
  double psd = 1e-7;
};

struct NpaOptions {
  SdpOptions sdp;
  CertificateTolerances certificate;
};

struct MomentSolution {
  /// Moment-side optimum (objective . y).
  double primal = 0.0;
  /// Value of the dual certificate (an upper bound when it is feasible).
  double dual = 0.0;
  double gap = 0.0;
  double max_residual = 0.0;
  double min_eig = 0.0;
  SdpStatus status = SdpStatus::NumericalFailure;
  bool dual_available = false;
  bool certified = false;
  int iterations = 0;
  Eigen::VectorXd moments;
};

MomentSolution solve(const MomentProblem& problem, const NpaOptions& options = {});

/// Solver status optimal, dual available, gap, affine residual and minimum
/// eigenvalue within tolerance.
bool certify_point(const MomentSolution& sol, const CertificateTolerances& tol = {});

/// Uniform grid of `points` thresholds from the classical to the quantum
/// bound, both endpoints included.
std::vector<double> threshold_grid(double alpha, int points);

struct ScanRow {
  double alpha = 0.0;
  double s = 0.0;
  MomentSolution solution;
  /// Non-empty when the point raised instead of returning a solution.
  std::string error;
};

/// Solves every (alpha, grid point) pair; points run in parallel.
std::vector<ScanRow> scan(const std::vector<double>& alphas, int grid_points = 60, const NpaOptions& options = {});

struct SanityReport {
  double max_dev = 0.0;
  double mean_dev = 0.0;
  std::vector<bool> certified_mask;
  std::vector<ScanRow> rows;
};

/// alpha = 0 scan compared with sqrt(8 - s^2) on certified points.
SanityReport alpha0_sanity(int grid_points = 60, const NpaOptions& options = {});

}  // namespace shadowcert
