#include "shadowcert/sdp.hpp"

#include "shadowcert/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace shadowcert {

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::OptimalInaccurate: return "optimal_inaccurate";
    case SdpStatus::Infeasible: return "infeasible";
    case SdpStatus::MaxIterations: return "max_iterations";
    case SdpStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

void SdpProblem::validate() const {
  const auto n = size();
  if (c.rows() != c.cols() || n == 0) throw DimensionError("sdp: C must be square and nonempty");
  if (static_cast<Eigen::Index>(a.size()) != constraints()) throw DimensionError("sdp: one A_k per entry of b");
  auto symmetric = [](const Eigen::MatrixXd& m) { return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12; };
  if (!symmetric(c)) throw DimensionError("sdp: C must be symmetric");
  for (const auto& ak : a)
    if (ak.rows() != n || ak.cols() != n || !symmetric(ak)) throw DimensionError("sdp: A_k must be symmetric n x n");
}

namespace {

template <class Real>
struct Kernel {
  using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

  static Real inner(const Matrix& p, const Matrix& q) { return p.cwiseProduct(q).sum(); }

  static Matrix sym(const Matrix& m) { return Real(0.5) * (m + m.transpose()); }

  // Largest step t in (0, inf] with x + t dx psd, given the Cholesky factor of x.
  static Real max_step(const Eigen::LLT<Matrix>& chol, const Matrix& dx) {
    const Matrix l_inv_dx = chol.matrixL().solve(dx);
    const Matrix w = chol.matrixL().solve(l_inv_dx.transpose());
    const Real lmin = Eigen::SelfAdjointEigenSolver<Matrix>(sym(w), Eigen::EigenvaluesOnly).eigenvalues()(0);
    return lmin < 0 ? Real(-1) / lmin : std::numeric_limits<Real>::infinity();
  }

  std::vector<Matrix> a;
  Matrix c;
  Vector b;

  explicit Kernel(const SdpProblem& p) : c(p.c.cast<Real>()), b(p.b.cast<Real>()) {
    for (const auto& ak : p.a) a.push_back(ak.cast<Real>());
  }

  Vector apply(const Matrix& w) const {
    Vector out(b.size());
    for (Eigen::Index k = 0; k < out.size(); ++k) out(k) = inner(a[static_cast<std::size_t>(k)], w);
    return out;
  }

  Matrix adjoint(const Vector& y) const {
    Matrix out = Matrix::Zero(c.rows(), c.cols());
    for (Eigen::Index k = 0; k < y.size(); ++k) out += y(k) * a[static_cast<std::size_t>(k)];
    return out;
  }

  SdpResult solve(const SdpOptions& options) const {
    const Eigen::Index n = c.rows();
    const Eigen::Index m = b.size();
    const Real dn = static_cast<Real>(n);

    const double b_norm = static_cast<double>(b.norm());
    const double c_norm = static_cast<double>(c.norm());
    Real a_max = 0, ratio = 0;
    for (Eigen::Index k = 0; k < m; ++k) {
      const Real nk = a[static_cast<std::size_t>(k)].norm();
      a_max = std::max(a_max, nk);
      ratio = std::max(ratio, (1 + std::abs(b(k))) / (1 + nk));
    }
    const Real xi = std::max({Real(10), std::sqrt(dn), dn * ratio});
    const Real eta = std::max({Real(10), std::sqrt(dn), Real(c_norm), a_max});

    SdpResult r;
    Matrix x = xi * Matrix::Identity(n, n);
    Matrix z = eta * Matrix::Identity(n, n);
    Vector y = Vector::Zero(m);

    auto converged = [&](double pinf, double dinf, double gap, double pobj, double dobj, double scale) {
      const double obj = std::max(std::abs(pobj), std::abs(dobj));
      return pinf <= scale * (options.abs_tol + options.rel_tol * b_norm) &&
             dinf <= scale * (options.abs_tol + options.rel_tol * c_norm) &&
             gap <= scale * (options.abs_tol + options.rel_tol * obj);
    };

    double best_merit = std::numeric_limits<double>::infinity();
    int stalled = 0;
    const double inaccurate_scale = options.inaccurate_tol / std::max(options.abs_tol, 1e-300);

    for (r.iterations = 0; r.iterations < options.max_iterations; ++r.iterations) {
      const Vector rp = b - apply(x);
      const Matrix rd = c - adjoint(y) - z;
      const double pobj = static_cast<double>(inner(c, x));
      const double dobj = static_cast<double>(b.dot(y));
      const double pinf = static_cast<double>(rp.norm());
      const double dinf = static_cast<double>(rd.norm());
      const double gap = std::abs(pobj - dobj);
      const Real mu = inner(x, z) / dn;
      r.x = x.template cast<double>();
      r.y = y.template cast<double>();
      r.z = z.template cast<double>();
      r.primal_objective = pobj;
      r.dual_objective = dobj;
      r.primal_infeasibility = pinf;
      r.dual_infeasibility = dinf;

      if (converged(pinf, dinf, gap, pobj, dobj, 1.0)) {
        r.status = SdpStatus::Optimal;
        return r;
      }
      if (x.trace() > options.divergence || z.trace() > options.divergence) {
        r.status = SdpStatus::Infeasible;
        return r;
      }
      const double merit = std::max({pinf / (1.0 + b_norm), dinf / (1.0 + c_norm), gap / (1.0 + std::abs(pobj))});
      if (merit < 0.5 * best_merit) {
        best_merit = merit;
        stalled = 0;
      } else if (++stalled > 15) {
        break;
      }

      const Eigen::LLT<Matrix> chol_x(x), chol_z(z);
      if (chol_x.info() != Eigen::Success || chol_z.info() != Eigen::Success) break;
      const Matrix z_inv = chol_z.solve(Matrix::Identity(n, n));

      // Schur complement M_ij = <A_i, X A_j Z^-1>
      std::vector<Matrix> g(static_cast<std::size_t>(m));
      for (Eigen::Index j = 0; j < m; ++j) g[static_cast<std::size_t>(j)] = x * a[static_cast<std::size_t>(j)] * z_inv;
      Matrix schur(m, m);
      for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i; j < m; ++j)
          schur(i, j) = schur(j, i) = inner(a[static_cast<std::size_t>(i)], g[static_cast<std::size_t>(j)]);
      const Eigen::LDLT<Matrix> schur_f(schur);
      if (schur_f.info() != Eigen::Success) break;

      const Matrix x_rd_zinv = x * rd * z_inv;
      auto direction = [&](Real sigma_mu, const Matrix* second_order, Matrix& dx, Vector& dy, Matrix& dz) {
        Matrix target = sigma_mu * z_inv - x;
        if (second_order) target -= *second_order;
        dy = schur_f.solve(rp - apply(target) + apply(x_rd_zinv));
        // refinement against the residual of the assembled direction
        for (int pass = 0; pass < 3; ++pass) {
          dz = sym(rd - adjoint(dy));
          dx = sym(target - x * dz * z_inv);
          if (pass == 2) break;
          dy -= schur_f.solve(apply(dx) - rp);
        }
      };

      Matrix dxa, dza;
      Vector dya;
      direction(0, nullptr, dxa, dya, dza);
      const Real ap_a = std::min(Real(1), max_step(chol_x, dxa));
      const Real ad_a = std::min(Real(1), max_step(chol_z, dza));
      const Real mu_a = inner(x + ap_a * dxa, z + ad_a * dza) / dn;
      const Real sigma = std::clamp(static_cast<Real>(std::pow(mu_a / mu, 3)), Real(0), Real(1));

      const Matrix corr = dxa * dza * z_inv;
      Matrix dx, dz;
      Vector dy;
      direction(sigma * mu, &corr, dx, dy, dz);
      if (!dx.allFinite() || !dy.allFinite() || !dz.allFinite()) break;
      const Real tau = 0.98;
      Real ap = std::min(Real(1), tau * max_step(chol_x, dx));
      Real ad = std::min(Real(1), tau * max_step(chol_z, dz));
      if (std::min(ap, ad) < Real(0.1)) {
        // blocked corrector step: fall back to a centering direction
        Matrix cx, cz;
        Vector cy;
        direction(Real(0.5) * mu, nullptr, cx, cy, cz);
        const Real cp = std::min(Real(1), tau * max_step(chol_x, cx));
        const Real cd = std::min(Real(1), tau * max_step(chol_z, cz));
        if (cx.allFinite() && cz.allFinite() && std::min(cp, cd) > std::min(ap, ad)) {
          dx = std::move(cx), dy = std::move(cy), dz = std::move(cz);
          ap = cp, ad = cd;
        }
      }
      if (ap < 1e-12 && ad < 1e-12) break;
      x = sym(x + ap * dx);
      y += ad * dy;
      z = sym(z + ad * dz);
    }

    const double pobj = r.primal_objective, dobj = r.dual_objective;
    if (r.iterations >= options.max_iterations)
      r.status = SdpStatus::MaxIterations;
    else if (converged(r.primal_infeasibility, r.dual_infeasibility, std::abs(pobj - dobj), pobj, dobj,
                       inaccurate_scale))
      r.status = SdpStatus::OptimalInaccurate;
    else
      r.status = SdpStatus::NumericalFailure;
    return r;
  }
};

}  // namespace

SdpResult sdp_solve(const SdpProblem& problem, const SdpOptions& options) {
  problem.validate();
  if (options.extended_precision) return Kernel<long double>(problem).solve(options);
  return Kernel<double>(problem).solve(options);
}

}  // namespace shadowcert
