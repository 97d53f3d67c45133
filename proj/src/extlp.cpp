#include "shadowcert/extlp.hpp"

#include "shadowcert/errors.hpp"

#include <algorithm>
#include <cmath>

namespace shadowcert {

const char* to_string(ExtensionClass c) { return c == ExtensionClass::Classical ? "classical" : "no_signalling"; }

void require_optimal(const LpResult& r, const std::string& what) {
  switch (r.status) {
    case LpStatus::Optimal: return;
    case LpStatus::Infeasible: throw InfeasibleError(what + ": extension set is empty");
    case LpStatus::Unbounded: throw SolverError(what + ": LP unbounded");
    case LpStatus::NumericalFailure: throw SolverError(what + ": LP numerical failure");
  }
}

namespace {

// Row-major flattening of a (joint input x joint output) table.
Eigen::VectorXd flatten(const Eigen::MatrixXd& m) {
  Eigen::VectorXd v(m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) v(r * m.cols() + c) = m(r, c);
  return v;
}

Eigen::MatrixXd unflatten(const Eigen::VectorXd& v, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = v(r * cols + c);
  return m;
}

struct Alphabets {
  int m1, m2, d1, d2;
  std::vector<int> inputs() const { return {m1, m2, m2}; }
  std::vector<int> outputs() const { return {d1, d2, d2}; }
};

Alphabets validate(const ExtensionProblem& problem) {
  const Behavior& p = problem.authorized;
  if (p.parties() != 2) throw DimensionError("extension problem: authorized behavior must have two parties");
  for (int i = 0; i < 2; ++i)
    if (p.inputs(i) > kMaxExtensionInputs || p.outputs(i) > kMaxExtensionOutputs)
      throw DimensionError("extension problem: alphabets above 2 inputs x 2 outputs per party are not supported");
  const auto ns = check_no_signalling(p, 1e-9);
  if (!ns.pass) throw SignallingError("extension problem: authorized behavior is signalling");
  if (problem.input_weights.size() != 0) {
    if (static_cast<std::size_t>(problem.input_weights.size()) != p.joint_inputs())
      throw DimensionError("extension problem: input distribution has wrong length");
    if (problem.input_weights.minCoeff() < 0.0 || std::abs(problem.input_weights.sum() - 1.0) > 1e-12)
      throw InvariantError("extension problem: input distribution must be a probability vector");
  }
  return {p.inputs(0), p.inputs(1), p.outputs(0), p.outputs(1)};
}

// Per-cell weights pi(t) of a (1,2)-shaped table, flattened row-major.
Eigen::VectorXd cell_weights(const ExtensionProblem& problem) {
  const Behavior& p = problem.authorized;
  const Eigen::VectorXd pi = problem.input_weights.size() ? problem.input_weights : uniform_input_weights(p);
  Eigen::VectorXd w(static_cast<Eigen::Index>(p.joint_inputs() * p.joint_outputs()));
  const auto cols = static_cast<Eigen::Index>(p.joint_outputs());
  for (Eigen::Index r = 0; r < pi.size(); ++r) w.segment(r * cols, cols).setConstant(pi(r));
  return w;
}

ExtensionPolytope no_signalling_polytope(const Behavior& p12, const Alphabets& a) {
  ExtensionPolytope poly;
  poly.inputs = a.inputs();
  poly.outputs = a.outputs();
  const auto rows = static_cast<Eigen::Index>(radix_product(poly.inputs));
  const auto cols = static_cast<Eigen::Index>(radix_product(poly.outputs));
  const Eigen::Index nz = rows * cols;
  auto var = [&](const std::vector<int>& t, const std::vector<int>& x) {
    return static_cast<Eigen::Index>(encode_mixed_radix(t, poly.inputs)) * cols +
           static_cast<Eigen::Index>(encode_mixed_radix(x, poly.outputs));
  };

  std::vector<Eigen::VectorXd> eq_rows;
  std::vector<double> eq_rhs;

  // normalization per joint input
  for (Eigen::Index r = 0; r < rows; ++r) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nz);
    row.segment(r * cols, cols).setOnes();
    eq_rows.push_back(row);
    eq_rhs.push_back(1.0);
  }
  // no-signalling: summing out party j removes dependence on t_j
  for (int j = 0; j < 3; ++j) {
    if (poly.inputs[static_cast<std::size_t>(j)] < 2) continue;
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto t = decode_mixed_radix(static_cast<std::size_t>(r), poly.inputs);
      if (t[static_cast<std::size_t>(j)] == 0) continue;
      auto t0 = t;
      t0[static_cast<std::size_t>(j)] = 0;
      std::vector<int> others_out;
      for (int i = 0; i < 3; ++i)
        if (i != j) others_out.push_back(poly.outputs[static_cast<std::size_t>(i)]);
      for (std::size_t o = 0; o < radix_product(others_out); ++o) {
        const auto xo = decode_mixed_radix(o, others_out);
        Eigen::VectorXd row = Eigen::VectorXd::Zero(nz);
        for (int xj = 0; xj < poly.outputs[static_cast<std::size_t>(j)]; ++xj) {
          std::vector<int> x;
          for (int i = 0, k = 0; i < 3; ++i) x.push_back(i == j ? xj : xo[static_cast<std::size_t>(k++)]);
          row(var(t, x)) += 1.0;
          row(var(t0, x)) -= 1.0;
        }
        eq_rows.push_back(row);
        eq_rhs.push_back(0.0);
      }
    }
  }
  // (1,2) marginal equals the authorized behavior for every t3
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto t = decode_mixed_radix(static_cast<std::size_t>(r), poly.inputs);
    for (int x1 = 0; x1 < a.d1; ++x1)
      for (int x2 = 0; x2 < a.d2; ++x2) {
        Eigen::VectorXd row = Eigen::VectorXd::Zero(nz);
        for (int x3 = 0; x3 < a.d2; ++x3) row(var(t, {x1, x2, x3})) = 1.0;
        eq_rows.push_back(row);
        const std::vector<int> t12{t[0], t[1]}, x12{x1, x2};
        eq_rhs.push_back(p12.prob(x12, t12));
      }
  }

  poly.eq_matrix.resize(static_cast<Eigen::Index>(eq_rows.size()), nz);
  poly.eq_rhs.resize(static_cast<Eigen::Index>(eq_rows.size()));
  for (std::size_t i = 0; i < eq_rows.size(); ++i) {
    poly.eq_matrix.row(static_cast<Eigen::Index>(i)) = eq_rows[i].transpose();
    poly.eq_rhs(static_cast<Eigen::Index>(i)) = eq_rhs[i];
  }

  // Q(x1,x3 | t1,t3) read at t2 = 0
  const Eigen::Index qcols = a.d1 * a.d2;
  poly.shadow_map = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.m1 * a.m2) * qcols, nz);
  for (int t1 = 0; t1 < a.m1; ++t1)
    for (int t3 = 0; t3 < a.m2; ++t3)
      for (int x1 = 0; x1 < a.d1; ++x1)
        for (int x3 = 0; x3 < a.d2; ++x3)
          for (int x2 = 0; x2 < a.d2; ++x2)
            poly.shadow_map((t1 * a.m2 + t3) * qcols + x1 * a.d2 + x3, var({t1, 0, t3}, {x1, x2, x3})) = 1.0;
  poly.extension_map = Eigen::MatrixXd::Identity(nz, nz);
  return poly;
}

ExtensionPolytope classical_polytope(const Behavior& p12, const Alphabets& a) {
  ExtensionPolytope poly;
  poly.inputs = a.inputs();
  poly.outputs = a.outputs();
  const auto f1 = deterministic_functions(a.m1, a.d1);
  const auto f2 = deterministic_functions(a.m2, a.d2);
  const auto nv = static_cast<Eigen::Index>(f1.size() * f2.size() * f2.size());
  const Eigen::Index cells12 = static_cast<Eigen::Index>(p12.joint_inputs() * p12.joint_outputs());
  const auto full_rows = static_cast<Eigen::Index>(radix_product(poly.inputs));
  const auto full_cols = static_cast<Eigen::Index>(radix_product(poly.outputs));

  poly.eq_matrix = Eigen::MatrixXd::Zero(1 + cells12, nv);
  poly.eq_rhs = Eigen::VectorXd::Zero(1 + cells12);
  poly.eq_rhs(0) = 1.0;
  poly.eq_rhs.tail(cells12) = flatten(p12.table());
  poly.shadow_map = Eigen::MatrixXd::Zero(cells12, nv);
  poly.extension_map = Eigen::MatrixXd::Zero(full_rows * full_cols, nv);

  // vertex index: player-major, then function index
  Eigen::Index v = 0;
  for (const auto& g1 : f1)
    for (const auto& g2 : f2)
      for (const auto& g3 : f2) {
        poly.eq_matrix(0, v) = 1.0;
        poly.eq_matrix.col(v).tail(cells12) =
            flatten(deterministic_behavior({a.m1, a.m2}, {a.d1, a.d2}, {g1, g2}).table());
        poly.shadow_map.col(v) = flatten(deterministic_behavior({a.m1, a.m2}, {a.d1, a.d2}, {g1, g3}).table());
        poly.extension_map.col(v) = flatten(deterministic_behavior(poly.inputs, poly.outputs, {g1, g2, g3}).table());
        ++v;
      }
  return poly;
}

Behavior extension_behavior(const ExtensionPolytope& poly, const Eigen::VectorXd& z) {
  const auto rows = static_cast<Eigen::Index>(radix_product(poly.inputs));
  const auto cols = static_cast<Eigen::Index>(radix_product(poly.outputs));
  Eigen::MatrixXd table = unflatten(poly.extension_map * z, rows, cols).cwiseMax(0.0);
  for (Eigen::Index r = 0; r < rows; ++r) table.row(r) /= table.row(r).sum();
  return Behavior(poly.inputs, poly.outputs, std::move(table));
}

}  // namespace

ExtensionPolytope build_extension_polytope(const ExtensionProblem& problem) {
  const Alphabets a = validate(problem);
  return problem.extension_class == ExtensionClass::NoSignalling ? no_signalling_polytope(problem.authorized, a)
                                                                  : classical_polytope(problem.authorized, a);
}

ExtensionResult collusive_vulnerability(const ExtensionProblem& problem, const GameKernel& kernel) {
  const auto poly = build_extension_polytope(problem);
  const Behavior& p = problem.authorized;
  if (kernel.inputs() != p.inputs() || kernel.outputs() != p.outputs())
    throw DimensionError("collusive_vulnerability: kernel must live on the relabelled (1,2) alphabets");
  LinearProgram lp;
  lp.objective = poly.shadow_map.transpose() * flatten(kernel.weighted_values());
  lp.eq_matrix = poly.eq_matrix;
  lp.eq_rhs = poly.eq_rhs;
  ExtensionResult out;
  out.lp = lp_solve(lp);
  require_optimal(out.lp, "collusive_vulnerability");
  out.value = out.lp.optimum;
  out.extension = extension_behavior(poly, out.lp.primal);
  return out;
}

ExtensionResult shadow_tv_distance(const ExtensionProblem& problem) {
  const auto poly = build_extension_polytope(problem);
  const Eigen::VectorXd p = flatten(problem.authorized.table());
  const Eigen::VectorXd w = cell_weights(problem);
  const Eigen::Index nz = poly.eq_matrix.cols();
  const Eigen::Index nc = p.size();

  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Zero(nz + nc);
  lp.objective.tail(nc) = -0.5 * w;
  lp.eq_matrix = Eigen::MatrixXd::Zero(poly.eq_matrix.rows(), nz + nc);
  lp.eq_matrix.leftCols(nz) = poly.eq_matrix;
  lp.eq_rhs = poly.eq_rhs;
  // u >= p - Mz  and  u >= Mz - p
  lp.ub_matrix = Eigen::MatrixXd::Zero(2 * nc, nz + nc);
  lp.ub_matrix.topLeftCorner(nc, nz) = -poly.shadow_map;
  lp.ub_matrix.topRightCorner(nc, nc) = -Eigen::MatrixXd::Identity(nc, nc);
  lp.ub_matrix.bottomLeftCorner(nc, nz) = poly.shadow_map;
  lp.ub_matrix.bottomRightCorner(nc, nc) = -Eigen::MatrixXd::Identity(nc, nc);
  lp.ub_rhs.resize(2 * nc);
  lp.ub_rhs << -p, p;

  ExtensionResult out;
  out.lp = lp_solve(lp);
  require_optimal(out.lp, "shadow_tv_distance");
  out.value = std::max(0.0, -out.lp.optimum);
  out.extension = extension_behavior(poly, out.lp.primal.head(nz));
  return out;
}

CapacityResult anticollusion_capacity(const ExtensionProblem& problem) {
  const auto poly = build_extension_polytope(problem);
  const Eigen::VectorXd p = flatten(problem.authorized.table());
  const Eigen::VectorXd w = cell_weights(problem);
  const Eigen::Index nz = poly.eq_matrix.cols();
  const Eigen::Index ny = poly.eq_matrix.rows();
  const Eigen::Index nc = p.size();

  // The dualized inner problem is only meaningful when Ext is nonempty.
  {
    LinearProgram feas;
    feas.objective = Eigen::VectorXd::Zero(nz);
    feas.eq_matrix = poly.eq_matrix;
    feas.eq_rhs = poly.eq_rhs;
    require_optimal(lp_solve(feas), "anticollusion_capacity");
  }

  // variables (h, y): maximize <W h, p> - b'y  s.t.  M'W h - A'y <= 0, 0 <= h <= 1, y free
  LinearProgram lp;
  lp.objective.resize(nc + ny);
  lp.objective << w.cwiseProduct(p), -poly.eq_rhs;
  lp.ub_matrix.resize(nz, nc + ny);
  lp.ub_matrix << poly.shadow_map.transpose() * w.asDiagonal(), -poly.eq_matrix.transpose();
  lp.ub_rhs = Eigen::VectorXd::Zero(nz);
  lp.lower.resize(nc + ny);
  lp.lower << Eigen::VectorXd::Zero(nc), Eigen::VectorXd::Constant(ny, -kInfinity);
  lp.upper.resize(nc + ny);
  lp.upper << Eigen::VectorXd::Ones(nc), Eigen::VectorXd::Constant(ny, kInfinity);

  CapacityResult out;
  out.lp = lp_solve(lp);
  require_optimal(out.lp, "anticollusion_capacity");
  out.value = std::max(0.0, out.lp.optimum);
  out.kernel = unflatten(out.lp.primal.head(nc), static_cast<Eigen::Index>(problem.authorized.joint_inputs()),
                         static_cast<Eigen::Index>(problem.authorized.joint_outputs()));
  return out;
}

double anti_collusion_power(const Behavior& p12, const GameKernel& kernel_a, const GameKernel& kernel_c,
                            ExtensionClass extension_class) {
  const double authorized = game_score(p12, kernel_a);
  const double vulnerability = collusive_vulnerability({p12, extension_class, {}}, kernel_c).value;
  return std::max(0.0, authorized - vulnerability);
}

}  // namespace shadowcert
