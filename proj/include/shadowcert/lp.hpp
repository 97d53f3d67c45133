#pragma once

#include <Eigen/Dense>

#include <limits>
#include <string>

namespace shadowcert {

/// maximize c'x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  lower <= x <= upper.
///
/// Empty bound vectors default to x >= 0 with no upper bound. Infinite
/// entries are allowed in either bound.
struct LinearProgram {
  Eigen::VectorXd objective;
  Eigen::MatrixXd eq_matrix;
  Eigen::VectorXd eq_rhs;
  Eigen::MatrixXd ub_matrix;
  Eigen::VectorXd ub_rhs;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Eigen::Index variables() const { return objective.size(); }
  /// Throws `DimensionError` when block sizes disagree.
  void validate() const;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

const char* to_string(LpStatus s);

struct LpOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  int max_pivots = 50000;
};

struct LpResult {
  LpStatus status = LpStatus::NumericalFailure;
  double optimum = 0.0;
  Eigen::VectorXd primal;
  /// Multipliers of the equality and inequality rows (ub duals are >= 0).
  Eigen::VectorXd dual_eq;
  Eigen::VectorXd dual_ub;
  /// |primal objective - dual objective| of the standard-form problem.
  double duality_gap = 0.0;
  /// Largest positive reduced cost at the final basis (0 when dual feasible).
  double dual_infeasibility = 0.0;
  /// Largest violation of any constraint by `primal`.
  double primal_residual = 0.0;
  int pivots = 0;

  bool optimal() const { return status == LpStatus::Optimal; }
};

/// Dense two-phase primal simplex (Dantzig pricing with a Bland fallback on
/// degenerate stalls). The final basis is refactorized to recover accurate
/// primal values and duals.
LpResult lp_solve(const LinearProgram& lp, const LpOptions& options = {});

}  // namespace shadowcert
