#pragma once

// Small dense semidefinite programs in standard primal-dual form:
//
//   primal:  min <C,X>   s.t. <A_k,X> = b_k,  X psd
//   dual:    max b'y     s.t. Z = C - sum_k y_k A_k psd
//
// Block-diagonal data stays block-diagonal along the iterates, so LP-style
// scalar constraints can be carried as 1x1 blocks of C and A_k.

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace shadowcert {

struct SdpProblem {
  Eigen::MatrixXd c;
  std::vector<Eigen::MatrixXd> a;
  Eigen::VectorXd b;

  Eigen::Index size() const { return c.rows(); }
  Eigen::Index constraints() const { return b.size(); }
  /// Throws `DimensionError` on shape mismatch or asymmetric data.
  void validate() const;
};

enum class SdpStatus { Optimal, OptimalInaccurate, Infeasible, MaxIterations, NumericalFailure };

const char* to_string(SdpStatus s);

struct SdpOptions {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  /// Looser level accepted as `OptimalInaccurate` when progress stalls.
  double inaccurate_tol = 1e-5;
  int max_iterations = 100000;
  /// Primal iterates with trace above this mark a dual-infeasible problem.
  double divergence = 1e12;
  /// Iterate in long double; results are still reported in double.
  bool extended_precision = true;
};

struct SdpResult {
  SdpStatus status = SdpStatus::NumericalFailure;
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  Eigen::MatrixXd z;
  double primal_objective = 0.0;  // <C,X>
  double dual_objective = 0.0;    // b'y
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
};

/// Infeasible-start primal-dual interior-point method with the HKM search
/// direction and Mehrotra predictor-corrector steps.
SdpResult sdp_solve(const SdpProblem& problem, const SdpOptions& options = {});

}  // namespace shadowcert
