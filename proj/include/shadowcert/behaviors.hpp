#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace shadowcert {

/// Big-endian mixed-radix encoding: the first digit is the most significant.
/// Party 1 is the leftmost digit everywhere in this library.
std::size_t encode_mixed_radix(std::span<const int> digits, std::span<const int> radices);
std::vector<int> decode_mixed_radix(std::size_t index, std::span<const int> radices);
std::size_t radix_product(std::span<const int> radices);

/// Conditional distribution P(x_1..x_k | t_1..t_k) over finite alphabets.
///
/// The table is stored densely: one row per joint input, one column per
/// joint output, both encoded big-endian in party order. Every row is a
/// probability vector.
class Behavior {
 public:
  static constexpr double kNormalizationTolerance = 1e-12;

  Behavior() = default;

  /// Validates nonnegativity and row normalization (1e-12); throws
  /// `InvariantError` or `DimensionError`.
  Behavior(std::vector<int> inputs, std::vector<int> outputs, Eigen::MatrixXd table);

  int parties() const { return static_cast<int>(inputs_.size()); }
  const std::vector<int>& inputs() const { return inputs_; }
  const std::vector<int>& outputs() const { return outputs_; }
  int inputs(int party) const { return inputs_.at(static_cast<std::size_t>(party)); }
  int outputs(int party) const { return outputs_.at(static_cast<std::size_t>(party)); }

  std::size_t joint_inputs() const { return static_cast<std::size_t>(table_.rows()); }
  std::size_t joint_outputs() const { return static_cast<std::size_t>(table_.cols()); }

  const Eigen::MatrixXd& table() const { return table_; }

  double operator()(std::size_t joint_input, std::size_t joint_output) const {
    return table_(static_cast<Eigen::Index>(joint_input), static_cast<Eigen::Index>(joint_output));
  }

  /// P(x | t) with per-party indices.
  double prob(std::span<const int> outputs, std::span<const int> inputs) const;

  bool same_alphabets(const Behavior& other) const {
    return inputs_ == other.inputs_ && outputs_ == other.outputs_;
  }

 private:
  std::vector<int> inputs_;
  std::vector<int> outputs_;
  Eigen::MatrixXd table_;
};

struct NoSignallingReport {
  double max_residual = 0.0;
  bool pass = true;
};

/// Maximum, over every proper nonempty party subset S and every pair of
/// joint inputs agreeing on S, of the discrepancy between the S-marginals.
NoSignallingReport check_no_signalling(const Behavior& p, double tol = 1e-9);

/// Marginal onto `parties` (strictly increasing indices). Throws
/// `SignallingError` if the result depends on the dropped inputs by more
/// than `tol`.
Behavior marginal(const Behavior& p, std::span<const int> parties, double tol = 1e-9);

/// Reinterprets a (1,3) marginal as a (1,2) behavior. The table is
/// unchanged; only the alphabet labels move. `party2_inputs/outputs` are the
/// alphabets party 3 must coincide with.
Behavior relabel_13_to_12(const Behavior& p13, int party2_inputs, int party2_outputs);

/// Uniform distribution over joint inputs of `p`.
Eigen::VectorXd uniform_input_weights(const Behavior& p);

/// E_{t~pi} 1/2 sum_x |P(x|t) - Q(x|t)|. An empty `pi` means uniform.
double tv_distance(const Behavior& p, const Behavior& q, const Eigen::VectorXd& pi = {});

/// Scoring kernel h(x,t) in [0,1] with an input distribution pi(t).
class GameKernel {
 public:
  GameKernel(std::vector<int> inputs, std::vector<int> outputs, Eigen::MatrixXd values,
             Eigen::VectorXd input_weights = {});

  const std::vector<int>& inputs() const { return inputs_; }
  const std::vector<int>& outputs() const { return outputs_; }
  const Eigen::MatrixXd& values() const { return values_; }
  const Eigen::VectorXd& input_weights() const { return weights_; }

  /// Cellwise pi(t) h(x,t), the linear functional the kernel defines.
  Eigen::MatrixXd weighted_values() const { return weights_.asDiagonal() * values_; }

 private:
  std::vector<int> inputs_;
  std::vector<int> outputs_;
  Eigen::MatrixXd values_;
  Eigen::VectorXd weights_;
};

/// h = 1 iff x1 xor x2 = t1 t2, uniform inputs. Outcome label 0 is the +1
/// outcome, so the score equals 1/2 + S/8.
GameKernel chsh_kernel();

/// sum_t pi(t) sum_x h(x,t) P(x|t).
double game_score(const Behavior& p, const GameKernel& kernel);

/// Per-party response rule p_i(x | t, lambda): one (inputs x outputs)
/// row-stochastic matrix per hidden-variable value.
using ResponseTable = std::vector<Eigen::MatrixXd>;

/// Local hidden-variable model with finite hidden variable.
struct LhvModel {
  Eigen::VectorXd weights;
  std::vector<ResponseTable> responses;

  int parties() const { return static_cast<int>(responses.size()); }
  int hidden_values() const { return static_cast<int>(weights.size()); }
  /// Throws `InvariantError` when weights or responses are not stochastic.
  void validate() const;
};

Behavior lhv_behavior(const LhvModel& model);

/// Replays the model's hidden variable to extra parties with the given
/// response rules. The marginal on the original parties is preserved
/// exactly.
Behavior copied_seed_extension(const LhvModel& model, const std::vector<ResponseTable>& colluders);
Behavior copied_seed_extension(const LhvModel& model, const ResponseTable& colluder);

/// Deterministic response t -> f(t) as a response table with one lambda.
Eigen::MatrixXd deterministic_response(std::span<const int> function, int outputs);

/// All functions {0..inputs-1} -> {0..outputs-1}, encoded big-endian as
/// (f(0), f(1), ...). Index order is lexicographic.
std::vector<std::vector<int>> deterministic_functions(int inputs, int outputs);

/// Deterministic behavior for one function per party (product of deltas).
Behavior deterministic_behavior(const std::vector<int>& inputs, const std::vector<int>& outputs,
                                const std::vector<std::vector<int>>& functions);

}  // namespace shadowcert
