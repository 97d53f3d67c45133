#pragma once

// Collusive extensions of a two-party behavior as linear programs.
//
// An extension of P12 is a three-party behavior P123 in the chosen class
// whose (1,2) marginal is P12; party 3 uses party 2's alphabets. The
// collusive shadow is the set of relabelled (1,3) marginals of extensions.
// Only the classical (local polytope) and no-signalling classes are
// polytopes, so only those are handled here.

#include "shadowcert/behaviors.hpp"
#include "shadowcert/lp.hpp"

#include <string>
#include <vector>

namespace shadowcert {

enum class ExtensionClass { Classical, NoSignalling };

const char* to_string(ExtensionClass c);

struct ExtensionProblem {
  Behavior authorized;
  ExtensionClass extension_class = ExtensionClass::NoSignalling;
  /// Input distribution used by scores and TV distances; empty = uniform.
  Eigen::VectorXd input_weights;
};

/// Largest alphabets accepted: 2 inputs and 2 outputs per party.
inline constexpr int kMaxExtensionInputs = 2;
inline constexpr int kMaxExtensionOutputs = 2;

/// Linear description of Ext_R(P12): variables z >= 0 with eq_matrix z = eq_rhs,
/// and shadow_map z = relabelled (1,3) marginal (flattened row-major, same
/// shape as P12's table).
struct ExtensionPolytope {
  Eigen::MatrixXd eq_matrix;
  Eigen::VectorXd eq_rhs;
  Eigen::MatrixXd shadow_map;
  /// For the no-signalling class: z -> full P123 table (identity). For the
  /// classical class: z -> P123 as a mixture of deterministic vertices.
  Eigen::MatrixXd extension_map;
  std::vector<int> inputs;   // tripartite alphabets
  std::vector<int> outputs;
};

/// Validates the problem (two parties, size cap, no-signalling within 1e-9)
/// and builds the constraint blocks.
ExtensionPolytope build_extension_polytope(const ExtensionProblem& problem);

struct ExtensionResult {
  double value = 0.0;
  LpResult lp;
  /// An optimal extension P123 (as a behavior).
  Behavior extension;
};

/// sup over extensions of the kernel's score on the relabelled (1,3)
/// marginal. Throws `InfeasibleError` when no extension exists.
ExtensionResult collusive_vulnerability(const ExtensionProblem& problem, const GameKernel& kernel);

/// inf over the shadow of d_TV(P12, Q), as a single LP over (extension, u)
/// with u >= |P12 - Q| cellwise.
ExtensionResult shadow_tv_distance(const ExtensionProblem& problem);

struct CapacityResult {
  double value = 0.0;
  LpResult lp;
  /// Optimal scoring kernel h in [0,1] (joint input x joint output).
  Eigen::MatrixXd kernel;
};

/// sup_{0<=h<=1} [<h,P12> - max_{Q in shadow} <h,Q>]_+. The inner max is
/// replaced by its LP dual (min b'y s.t. A'y >= M'Wh), giving one LP over
/// (h, y). Independent of `shadow_tv_distance`.
CapacityResult anticollusion_capacity(const ExtensionProblem& problem);

/// [score(P12, kernel_a) - V13(P12, kernel_c)]_+ .
double anti_collusion_power(const Behavior& p12, const GameKernel& kernel_a, const GameKernel& kernel_c,
                            ExtensionClass extension_class);

/// Rejects any solve whose status is not optimal, mapping statuses to
/// `InfeasibleError` / `SolverError`.
void require_optimal(const LpResult& r, const std::string& what);

}  // namespace shadowcert
