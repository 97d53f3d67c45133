#include "shadowcert/behaviors.hpp"

#include "shadowcert/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace shadowcert {

std::size_t radix_product(std::span<const int> radices) {
  std::size_t n = 1;
  for (int r : radices) n *= static_cast<std::size_t>(r);
  return n;
}

std::size_t encode_mixed_radix(std::span<const int> digits, std::span<const int> radices) {
  if (digits.size() != radices.size()) throw DimensionError("mixed radix: digit count mismatch");
  std::size_t index = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] < 0 || digits[i] >= radices[i]) throw DomainError("mixed radix: digit out of range");
    index = index * static_cast<std::size_t>(radices[i]) + static_cast<std::size_t>(digits[i]);
  }
  return index;
}

std::vector<int> decode_mixed_radix(std::size_t index, std::span<const int> radices) {
  std::vector<int> digits(radices.size());
  for (std::size_t i = radices.size(); i-- > 0;) {
    const auto r = static_cast<std::size_t>(radices[i]);
    digits[i] = static_cast<int>(index % r);
    index /= r;
  }
  return digits;
}

Behavior::Behavior(std::vector<int> inputs, std::vector<int> outputs, Eigen::MatrixXd table)
    : inputs_(std::move(inputs)), outputs_(std::move(outputs)), table_(std::move(table)) {
  if (inputs_.empty() || inputs_.size() != outputs_.size())
    throw DimensionError("behavior: inputs and outputs must list the same nonzero number of parties");
  for (std::size_t i = 0; i < inputs_.size(); ++i)
    if (inputs_[i] < 1 || outputs_[i] < 1) throw DimensionError("behavior: alphabets must be nonempty");
  if (static_cast<std::size_t>(table_.rows()) != radix_product(inputs_) ||
      static_cast<std::size_t>(table_.cols()) != radix_product(outputs_))
    throw DimensionError("behavior: table shape does not match alphabets");
  if (!table_.allFinite()) throw InvariantError("behavior: non-finite entry");
  if (table_.minCoeff() < -kNormalizationTolerance) throw InvariantError("behavior: negative probability");
  for (Eigen::Index r = 0; r < table_.rows(); ++r) {
    const double sum = table_.row(r).sum();
    if (std::abs(sum - 1.0) > kNormalizationTolerance)
      throw InvariantError("behavior: row " + std::to_string(r) + " sums to " + std::to_string(sum));
  }
}

double Behavior::prob(std::span<const int> x, std::span<const int> t) const {
  return (*this)(encode_mixed_radix(t, inputs_), encode_mixed_radix(x, outputs_));
}

namespace {

// Marginal table of `p` on `keep` (subset mask order), for a fixed choice of
// the dropped inputs given by `dropped_input`.
struct SubsetLayout {
  std::vector<int> keep;
  std::vector<int> drop;
  std::vector<int> keep_inputs, keep_outputs, drop_inputs;
};

SubsetLayout layout_for(const Behavior& p, std::span<const int> keep) {
  SubsetLayout l;
  std::vector<bool> in(p.parties(), false);
  for (int k : keep) {
    if (k < 0 || k >= p.parties()) throw DimensionError("party index out of range");
    in[static_cast<std::size_t>(k)] = true;
  }
  for (int i = 0; i < p.parties(); ++i) {
    if (in[static_cast<std::size_t>(i)]) {
      l.keep.push_back(i);
      l.keep_inputs.push_back(p.inputs(i));
      l.keep_outputs.push_back(p.outputs(i));
    } else {
      l.drop.push_back(i);
      l.drop_inputs.push_back(p.inputs(i));
    }
  }
  return l;
}

Eigen::MatrixXd subset_table(const Behavior& p, const SubsetLayout& l, std::size_t dropped_input) {
  const auto rows = radix_product(l.keep_inputs);
  const auto cols = radix_product(l.keep_outputs);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const auto dropped_digits = decode_mixed_radix(dropped_input, l.drop_inputs);
  std::vector<int> t(p.parties());
  for (std::size_t d = 0; d < l.drop.size(); ++d) t[static_cast<std::size_t>(l.drop[d])] = dropped_digits[d];
  std::vector<int> kt(l.keep.size()), kx(l.keep.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const auto kept_t = decode_mixed_radix(r, l.keep_inputs);
    for (std::size_t k = 0; k < l.keep.size(); ++k) t[static_cast<std::size_t>(l.keep[k])] = kept_t[k];
    const auto joint_t = encode_mixed_radix(t, p.inputs());
    for (std::size_t c = 0; c < p.joint_outputs(); ++c) {
      const auto x = decode_mixed_radix(c, p.outputs());
      for (std::size_t k = 0; k < l.keep.size(); ++k) kx[k] = x[static_cast<std::size_t>(l.keep[k])];
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(encode_mixed_radix(kx, l.keep_outputs))) +=
          p(joint_t, c);
    }
  }
  return m;
}

}  // namespace

NoSignallingReport check_no_signalling(const Behavior& p, double tol) {
  NoSignallingReport report;
  const int n = p.parties();
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    std::vector<int> keep;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) keep.push_back(i);
    const auto l = layout_for(p, keep);
    const Eigen::MatrixXd reference = subset_table(p, l, 0);
    for (std::size_t d = 1; d < radix_product(l.drop_inputs); ++d) {
      const double dev = (subset_table(p, l, d) - reference).cwiseAbs().maxCoeff();
      report.max_residual = std::max(report.max_residual, dev);
    }
  }
  report.pass = report.max_residual <= tol;
  return report;
}

Behavior marginal(const Behavior& p, std::span<const int> parties, double tol) {
  if (parties.empty()) throw DimensionError("marginal: empty party subset");
  for (std::size_t i = 1; i < parties.size(); ++i)
    if (parties[i] <= parties[i - 1]) throw DimensionError("marginal: parties must be strictly increasing");
  const auto l = layout_for(p, parties);
  Eigen::MatrixXd reference = subset_table(p, l, 0);
  for (std::size_t d = 1; d < radix_product(l.drop_inputs); ++d) {
    const double dev = (subset_table(p, l, d) - reference).cwiseAbs().maxCoeff();
    if (dev > tol)
      throw SignallingError("marginal depends on dropped inputs (discrepancy " + std::to_string(dev) + ")");
  }
  return Behavior(l.keep_inputs, l.keep_outputs, std::move(reference));
}

Behavior relabel_13_to_12(const Behavior& p13, int party2_inputs, int party2_outputs) {
  if (p13.parties() != 2) throw DimensionError("relabel: expected a two-party (1,3) behavior");
  if (p13.inputs(1) != party2_inputs || p13.outputs(1) != party2_outputs)
    throw DimensionError("relabel: party 3 alphabets differ from party 2 alphabets");
  return Behavior({p13.inputs(0), party2_inputs}, {p13.outputs(0), party2_outputs}, p13.table());
}

Eigen::VectorXd uniform_input_weights(const Behavior& p) {
  const auto n = static_cast<Eigen::Index>(p.joint_inputs());
  return Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
}

namespace {

Eigen::VectorXd resolve_weights(const Eigen::VectorXd& pi, std::size_t rows) {
  if (pi.size() == 0) return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(rows), 1.0 / static_cast<double>(rows));
  if (static_cast<std::size_t>(pi.size()) != rows) throw DimensionError("input distribution has wrong length");
  if (pi.minCoeff() < 0.0 || std::abs(pi.sum() - 1.0) > 1e-12)
    throw InvariantError("input distribution must be a probability vector");
  return pi;
}

}  // namespace

double tv_distance(const Behavior& p, const Behavior& q, const Eigen::VectorXd& pi) {
  if (!p.same_alphabets(q)) throw DimensionError("tv_distance: alphabet mismatch");
  const Eigen::VectorXd w = resolve_weights(pi, p.joint_inputs());
  return 0.5 * w.dot((p.table() - q.table()).cwiseAbs().rowwise().sum());
}

GameKernel::GameKernel(std::vector<int> inputs, std::vector<int> outputs, Eigen::MatrixXd values,
                       Eigen::VectorXd input_weights)
    : inputs_(std::move(inputs)), outputs_(std::move(outputs)), values_(std::move(values)) {
  if (inputs_.size() != outputs_.size() || inputs_.empty()) throw DimensionError("kernel: bad party count");
  if (static_cast<std::size_t>(values_.rows()) != radix_product(inputs_) ||
      static_cast<std::size_t>(values_.cols()) != radix_product(outputs_))
    throw DimensionError("kernel: value table shape does not match alphabets");
  if (values_.size() > 0 && (values_.minCoeff() < 0.0 || values_.maxCoeff() > 1.0))
    throw InvariantError("kernel: values must lie in [0,1]");
  weights_ = resolve_weights(input_weights, static_cast<std::size_t>(values_.rows()));
}

GameKernel chsh_kernel() {
  Eigen::MatrixXd h(4, 4);
  for (int t1 = 0; t1 < 2; ++t1)
    for (int t2 = 0; t2 < 2; ++t2)
      for (int x1 = 0; x1 < 2; ++x1)
        for (int x2 = 0; x2 < 2; ++x2) h(t1 * 2 + t2, x1 * 2 + x2) = ((x1 ^ x2) == (t1 & t2)) ? 1.0 : 0.0;
  return GameKernel({2, 2}, {2, 2}, h);
}

double game_score(const Behavior& p, const GameKernel& kernel) {
  if (p.inputs() != kernel.inputs() || p.outputs() != kernel.outputs())
    throw DimensionError("game_score: kernel alphabets do not match behavior");
  return kernel.weighted_values().cwiseProduct(p.table()).sum();
}

void LhvModel::validate() const {
  if (weights.size() == 0) throw InvariantError("lhv: no hidden values");
  if (weights.minCoeff() < 0.0 || std::abs(weights.sum() - 1.0) > 1e-12)
    throw InvariantError("lhv: weights must form a probability vector");
  if (responses.empty()) throw InvariantError("lhv: no parties");
  for (const auto& table : responses) {
    if (static_cast<Eigen::Index>(table.size()) != weights.size())
      throw InvariantError("lhv: response table must have one entry per hidden value");
    for (const auto& m : table) {
      if (m.rows() != table.front().rows() || m.cols() != table.front().cols() || m.size() == 0)
        throw InvariantError("lhv: response shapes differ across hidden values");
      if (m.minCoeff() < 0.0) throw InvariantError("lhv: negative response probability");
      if (((m.rowwise().sum().array() - 1.0).abs() > 1e-12).any())
        throw InvariantError("lhv: response rows must sum to 1");
    }
  }
}

namespace {

Behavior mix_products(const Eigen::VectorXd& weights, const std::vector<const ResponseTable*>& tables) {
  std::vector<int> inputs, outputs;
  for (const auto* t : tables) {
    inputs.push_back(static_cast<int>(t->front().rows()));
    outputs.push_back(static_cast<int>(t->front().cols()));
  }
  const auto rows = radix_product(inputs);
  const auto cols = radix_product(outputs);
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto t = decode_mixed_radix(r, inputs);
    for (std::size_t c = 0; c < cols; ++c) {
      const auto x = decode_mixed_radix(c, outputs);
      double sum = 0.0;
      for (Eigen::Index lambda = 0; lambda < weights.size(); ++lambda) {
        double term = weights(lambda);
        for (std::size_t i = 0; i < tables.size() && term != 0.0; ++i)
          term *= (*tables[i])[static_cast<std::size_t>(lambda)](t[i], x[i]);
        sum += term;
      }
      table(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = sum;
    }
  }
  return Behavior(inputs, outputs, std::move(table));
}

}  // namespace

Behavior lhv_behavior(const LhvModel& model) {
  model.validate();
  std::vector<const ResponseTable*> tables;
  for (const auto& t : model.responses) tables.push_back(&t);
  return mix_products(model.weights, tables);
}

Behavior copied_seed_extension(const LhvModel& model, const std::vector<ResponseTable>& colluders) {
  LhvModel extended = model;
  extended.responses.insert(extended.responses.end(), colluders.begin(), colluders.end());
  extended.validate();
  return lhv_behavior(extended);
}

Behavior copied_seed_extension(const LhvModel& model, const ResponseTable& colluder) {
  return copied_seed_extension(model, std::vector<ResponseTable>{colluder});
}

Eigen::MatrixXd deterministic_response(std::span<const int> function, int outputs) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(function.size()), outputs);
  for (std::size_t t = 0; t < function.size(); ++t) {
    if (function[t] < 0 || function[t] >= outputs) throw DomainError("deterministic response: output out of range");
    m(static_cast<Eigen::Index>(t), function[t]) = 1.0;
  }
  return m;
}

std::vector<std::vector<int>> deterministic_functions(int inputs, int outputs) {
  const std::vector<int> radices(static_cast<std::size_t>(inputs), outputs);
  std::vector<std::vector<int>> out;
  for (std::size_t i = 0; i < radix_product(radices); ++i) out.push_back(decode_mixed_radix(i, radices));
  return out;
}

Behavior deterministic_behavior(const std::vector<int>& inputs, const std::vector<int>& outputs,
                                const std::vector<std::vector<int>>& functions) {
  if (functions.size() != inputs.size()) throw DimensionError("deterministic behavior: one function per party");
  const auto rows = radix_product(inputs);
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows),
                                                static_cast<Eigen::Index>(radix_product(outputs)));
  std::vector<int> x(inputs.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const auto t = decode_mixed_radix(r, inputs);
    for (std::size_t i = 0; i < inputs.size(); ++i) x[i] = functions[i].at(static_cast<std::size_t>(t[i]));
    table(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(encode_mixed_radix(x, outputs))) = 1.0;
  }
  return Behavior(inputs, outputs, std::move(table));
}

}  // namespace shadowcert
