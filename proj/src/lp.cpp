#include "shadowcert/lp.hpp"

#include "shadowcert/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace shadowcert {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

void LinearProgram::validate() const {
  const auto n = variables();
  if (eq_matrix.size() > 0 && (eq_matrix.cols() != n || eq_matrix.rows() != eq_rhs.size()))
    throw DimensionError("lp: equality block shape mismatch");
  if (eq_matrix.size() == 0 && eq_rhs.size() != 0) throw DimensionError("lp: equality rhs without matrix");
  if (ub_matrix.size() > 0 && (ub_matrix.cols() != n || ub_matrix.rows() != ub_rhs.size()))
    throw DimensionError("lp: inequality block shape mismatch");
  if (ub_matrix.size() == 0 && ub_rhs.size() != 0) throw DimensionError("lp: inequality rhs without matrix");
  if ((lower.size() != 0 && lower.size() != n) || (upper.size() != 0 && upper.size() != n))
    throw DimensionError("lp: bound vector length mismatch");
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// x = offset + map * z with z >= 0.
struct StandardForm {
  Eigen::MatrixXd a;  // rows: eq, ub, bound rows
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  double objective_offset = 0.0;
  Eigen::VectorXd offset;
  Eigen::MatrixXd map;
  Eigen::Index eq_rows = 0, ub_rows = 0;
};

StandardForm to_standard_form(const LinearProgram& lp) {
  const auto n = lp.variables();
  const Eigen::VectorXd lo = lp.lower.size() ? lp.lower : Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd hi = lp.upper.size() ? lp.upper : Eigen::VectorXd::Constant(n, kInfinity);

  // Column layout of z and extra bound rows.
  std::vector<Eigen::Index> bounded;  // original vars needing z_j <= hi - lo rows
  Eigen::Index nz = 0;
  for (Eigen::Index j = 0; j < n; ++j) nz += (std::isinf(lo(j)) && std::isinf(hi(j))) ? 2 : 1;
  StandardForm sf;
  sf.offset = Eigen::VectorXd::Zero(n);
  sf.map = Eigen::MatrixXd::Zero(n, nz);
  std::vector<Eigen::Index> z_of(static_cast<std::size_t>(n));
  Eigen::Index col = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (lo(j) > hi(j)) throw DomainError("lp: lower bound exceeds upper bound");
    z_of[static_cast<std::size_t>(j)] = col;
    if (!std::isinf(lo(j))) {
      sf.offset(j) = lo(j);
      sf.map(j, col++) = 1.0;
      if (!std::isinf(hi(j))) bounded.push_back(j);
    } else if (!std::isinf(hi(j))) {
      sf.offset(j) = hi(j);
      sf.map(j, col++) = -1.0;
    } else {
      sf.map(j, col++) = 1.0;
      sf.map(j, col++) = -1.0;
    }
  }

  sf.eq_rows = lp.eq_rhs.size();
  sf.ub_rows = lp.ub_rhs.size();
  const Eigen::Index slack_rows = sf.ub_rows + static_cast<Eigen::Index>(bounded.size());
  const Eigen::Index m = sf.eq_rows + slack_rows;
  sf.a = Eigen::MatrixXd::Zero(m, nz + slack_rows);
  sf.b = Eigen::VectorXd::Zero(m);
  if (sf.eq_rows) {
    sf.a.topLeftCorner(sf.eq_rows, nz) = lp.eq_matrix * sf.map;
    sf.b.head(sf.eq_rows) = lp.eq_rhs - lp.eq_matrix * sf.offset;
  }
  if (sf.ub_rows) {
    sf.a.block(sf.eq_rows, 0, sf.ub_rows, nz) = lp.ub_matrix * sf.map;
    sf.b.segment(sf.eq_rows, sf.ub_rows) = lp.ub_rhs - lp.ub_matrix * sf.offset;
  }
  for (std::size_t k = 0; k < bounded.size(); ++k) {
    const auto j = bounded[k];
    const auto row = sf.eq_rows + sf.ub_rows + static_cast<Eigen::Index>(k);
    sf.a(row, z_of[static_cast<std::size_t>(j)]) = 1.0;
    sf.b(row) = hi(j) - lo(j);
  }
  for (Eigen::Index r = 0; r < slack_rows; ++r) sf.a(sf.eq_rows + r, nz + r) = 1.0;
  sf.c = Eigen::VectorXd::Zero(nz + slack_rows);
  sf.c.head(nz) = sf.map.transpose() * lp.objective;
  sf.objective_offset = lp.objective.dot(sf.offset);
  return sf;
}

class Tableau {
 public:
  Tableau(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const LpOptions& opt)
      : m_(a.rows()), n_(a.cols()), opt_(opt) {
    t_ = RowMatrix::Zero(m_, n_ + m_);
    t_.leftCols(n_) = a;
    t_.rightCols(m_).setIdentity();
    rhs_ = b;
    for (Eigen::Index i = 0; i < m_; ++i)
      if (rhs_(i) < 0) {
        t_.row(i) *= -1.0;
        rhs_(i) *= -1.0;
        t_(i, n_ + i) = 1.0;
      }
    basis_.resize(static_cast<std::size_t>(m_));
    for (Eigen::Index i = 0; i < m_; ++i) basis_[static_cast<std::size_t>(i)] = n_ + i;
  }

  Eigen::Index rows() const { return m_; }
  const std::vector<Eigen::Index>& basis() const { return basis_; }
  bool is_artificial(Eigen::Index j) const { return j >= n_; }

  // Sets the objective (one coefficient per structural column; artificials
  // take `artificial_cost`) and prices out the current basis.
  void set_objective(const Eigen::VectorXd& c, double artificial_cost) {
    cost_ = Eigen::VectorXd::Constant(n_ + m_, artificial_cost);
    cost_.head(n_) = c;
    reduced_ = cost_;
    value_ = 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double cb = cost_(basis_[static_cast<std::size_t>(i)]);
      if (cb != 0.0) {
        reduced_ -= cb * t_.row(i).transpose();
        value_ += cb * rhs_(i);
      }
    }
  }

  double value() const { return value_; }

  enum class Outcome { Optimal, Unbounded, PivotLimit };

  Outcome optimize(bool allow_artificial, int& pivots) {
    int stall = 0;
    bool bland = false;
    while (true) {
      if (pivots >= opt_.max_pivots) return Outcome::PivotLimit;
      const Eigen::Index limit = allow_artificial ? n_ + m_ : n_;
      Eigen::Index q = -1;
      double best = opt_.optimality_tol;
      for (Eigen::Index j = 0; j < limit; ++j) {
        if (reduced_(j) > best) {
          q = j;
          if (bland) break;
          best = reduced_(j);
        }
      }
      if (q < 0) return Outcome::Optimal;
      Eigen::Index r = -1;
      double ratio = kInfinity;
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double aij = t_(i, q);
        if (aij <= opt_.pivot_tol) continue;
        const double ri = std::max(0.0, rhs_(i)) / aij;
        if (r < 0 || ri < ratio - 1e-12 * (1.0 + ratio)) {
          r = i;
          ratio = ri;
        } else if (ri <= ratio + 1e-12 * (1.0 + ratio)) {
          const bool take = bland ? basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(r)]
                                  : aij > t_(r, q);
          if (take) {
            r = i;
            ratio = std::min(ratio, ri);
          }
        }
      }
      if (r < 0) return Outcome::Unbounded;
      const double before = value_;
      pivot(r, q);
      ++pivots;
      if (value_ > before + 1e-12 * (1.0 + std::abs(before))) {
        stall = 0;
        bland = false;
      } else if (++stall > 50) {
        bland = true;
      }
    }
  }

  void pivot(Eigen::Index r, Eigen::Index q) {
    const double p = t_(r, q);
    t_.row(r) /= p;
    rhs_(r) /= p;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = t_(i, q);
      if (f != 0.0) {
        t_.row(i) -= f * t_.row(r);
        rhs_(i) -= f * rhs_(r);
        t_(i, q) = 0.0;
      }
    }
    const double dq = reduced_(q);
    reduced_ -= dq * t_.row(r).transpose();
    reduced_(q) = 0.0;
    value_ += dq * rhs_(r);
    basis_[static_cast<std::size_t>(r)] = q;
  }

  // Pivots basic artificials out where possible; those left sit on
  // redundant constraints.
  void expel_artificials(int& pivots) {
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[static_cast<std::size_t>(i)])) continue;
      Eigen::Index q = -1;
      double best = opt_.pivot_tol;
      for (Eigen::Index j = 0; j < n_; ++j)
        if (std::abs(t_(i, j)) > best) {
          best = std::abs(t_(i, j));
          q = j;
        }
      if (q >= 0) {
        pivot(i, q);
        ++pivots;
      }
    }
  }

  Eigen::VectorXd structural_solution() const {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const auto j = basis_[static_cast<std::size_t>(i)];
      if (j < n_) z(j) = rhs_(i);
    }
    return z;
  }

 private:
  Eigen::Index m_, n_;
  LpOptions opt_;
  RowMatrix t_;
  Eigen::VectorXd rhs_, cost_, reduced_;
  double value_ = 0.0;
  std::vector<Eigen::Index> basis_;
};

double original_residual(const LinearProgram& lp, const Eigen::VectorXd& x) {
  double res = 0.0;
  if (lp.eq_rhs.size()) res = std::max(res, (lp.eq_matrix * x - lp.eq_rhs).cwiseAbs().maxCoeff());
  if (lp.ub_rhs.size()) res = std::max(res, (lp.ub_matrix * x - lp.ub_rhs).maxCoeff());
  if (lp.lower.size()) res = std::max(res, (lp.lower - x).maxCoeff());
  if (lp.upper.size()) res = std::max(res, (x - lp.upper).maxCoeff());
  return std::max(res, 0.0);
}

}  // namespace

LpResult lp_solve(const LinearProgram& lp, const LpOptions& options) {
  lp.validate();
  const StandardForm sf = to_standard_form(lp);
  const Eigen::Index m = sf.a.rows();
  const Eigen::Index nz = sf.a.cols();
  LpResult result;

  Tableau tab(sf.a, sf.b, options);
  const double scale = 1.0 + (m ? sf.b.cwiseAbs().maxCoeff() : 0.0);

  // Phase 1: maximize -sum(artificials).
  tab.set_objective(Eigen::VectorXd::Zero(nz), -1.0);
  if (tab.optimize(true, result.pivots) == Tableau::Outcome::PivotLimit) return result;
  if (tab.value() < -options.feasibility_tol * scale) {
    result.status = LpStatus::Infeasible;
    return result;
  }
  tab.expel_artificials(result.pivots);

  // Phase 2 on structural columns only.
  tab.set_objective(sf.c, 0.0);
  const auto outcome = tab.optimize(false, result.pivots);
  if (outcome == Tableau::Outcome::Unbounded) {
    result.status = LpStatus::Unbounded;
    return result;
  }
  if (outcome == Tableau::Outcome::PivotLimit) return result;

  // Refactorize the optimal basis on the non-redundant rows.
  // A basic artificial in any position stands in for its own original row.
  std::vector<bool> dropped(static_cast<std::size_t>(m), false);
  std::vector<Eigen::Index> rows, cols;
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto j = tab.basis()[static_cast<std::size_t>(i)];
    if (tab.is_artificial(j))
      dropped[static_cast<std::size_t>(j - nz)] = true;
    else
      cols.push_back(j);
  }
  for (Eigen::Index i = 0; i < m; ++i)
    if (!dropped[static_cast<std::size_t>(i)]) rows.push_back(i);
  const auto k = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd basis_matrix(k, k);
  Eigen::VectorXd b_kept(k), c_basis(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    b_kept(r) = sf.b(rows[static_cast<std::size_t>(r)]);
    c_basis(r) = sf.c(cols[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < k; ++c)
      basis_matrix(r, c) = sf.a(rows[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)]);
  }
  Eigen::VectorXd z = tab.structural_solution();
  Eigen::VectorXd y_kept = Eigen::VectorXd::Zero(k);
  if (k > 0) {
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix);
    const Eigen::VectorXd zb = lu.solve(b_kept);
    y_kept = lu.transpose().solve(c_basis);
    if (zb.allFinite() && y_kept.allFinite() && zb.minCoeff() > -options.feasibility_tol * scale) {
      z.setZero();
      for (Eigen::Index r = 0; r < k; ++r) z(cols[static_cast<std::size_t>(r)]) = std::max(0.0, zb(r));
    } else {
      result.status = LpStatus::NumericalFailure;
      return result;
    }
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  for (Eigen::Index r = 0; r < k; ++r) y(rows[static_cast<std::size_t>(r)]) = y_kept(r);

  const Eigen::VectorXd reduced = sf.c - sf.a.transpose() * y;
  result.dual_infeasibility = nz ? std::max(0.0, reduced.maxCoeff()) : 0.0;
  const double primal_obj = sf.c.dot(z);
  const double dual_obj = sf.b.dot(y);
  result.duality_gap = std::abs(primal_obj - dual_obj);
  result.primal = sf.offset + sf.map * z.head(sf.map.cols());
  result.optimum = lp.objective.dot(result.primal);
  result.dual_eq = y.head(sf.eq_rows);
  result.dual_ub = y.segment(sf.eq_rows, sf.ub_rows);
  result.primal_residual = original_residual(lp, result.primal);
  const double tol = 1e-7 * scale;
  result.status = (result.primal_residual <= tol && result.dual_infeasibility <= 1e-7 * (1.0 + sf.c.cwiseAbs().maxCoeff()))
                      ? LpStatus::Optimal
                      : LpStatus::NumericalFailure;
  return result;
}

}  // namespace shadowcert
