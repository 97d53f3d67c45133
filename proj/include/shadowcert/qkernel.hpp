#pragma once

// Dense complex linear algebra for few-qubit states and binary observables.
//
// Conventions: party 1 is the leftmost tensor factor and basis indices are
// big-endian in party order, so |110> is index 6. A binary observable O has
// outcomes +1 (label 0) and -1 (label 1) with projectors (I + O)/2 and
// (I - O)/2.

#include "shadowcert/behaviors.hpp"
#include "shadowcert/errors.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace shadowcert {

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

namespace qtol {
inline constexpr double kKetNorm = 1e-12;
inline constexpr double kHermitian = 1e-10;
inline constexpr double kTrace = 1e-12;
inline constexpr double kPsd = 1e-10;
inline constexpr double kSpectrum = 1e-10;
inline constexpr double kImaginary = 1e-8;
}  // namespace qtol

namespace detail {

inline int qubit_count(Eigen::Index dim) {
  if (dim < 2) throw DimensionError("dimension must be a power of two >= 2");
  int n = 0;
  Eigen::Index d = dim;
  while (d > 1) {
    if (d % 2 != 0) throw DimensionError("dimension must be a power of two");
    d /= 2;
    ++n;
  }
  return n;
}

// Returns (M + M^dagger)/2 after checking the anti-Hermitian part is below tol.
template <typename Real>
CMatrix<Real> symmetrized(const CMatrix<Real>& m, const char* what) {
  if (m.rows() != m.cols()) throw DimensionError(std::string(what) + ": matrix must be square");
  const Real dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (!(dev <= Real(qtol::kHermitian))) throw InvariantError(std::string(what) + ": matrix is not Hermitian");
  return (m + m.adjoint()) / Real(2);
}

template <typename Real>
Eigen::Matrix<Real, Eigen::Dynamic, 1> hermitian_eigenvalues(const CMatrix<Real>& m) {
  return Eigen::SelfAdjointEigenSolver<CMatrix<Real>>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace detail

/// Normalized pure state on a power-of-two dimension.
template <typename Real = double>
class BasicKet {
 public:
  explicit BasicKet(CVector<Real> amplitudes) : amplitudes_(std::move(amplitudes)) {
    qubits_ = detail::qubit_count(amplitudes_.size());
    if (!(std::abs(amplitudes_.squaredNorm() - Real(1)) <= Real(qtol::kKetNorm)))
      throw InvariantError("ket: squared norm differs from 1");
  }

  const CVector<Real>& amplitudes() const { return amplitudes_; }
  Eigen::Index dim() const { return amplitudes_.size(); }
  int qubits() const { return qubits_; }

  CMatrix<Real> projector() const { return amplitudes_ * amplitudes_.adjoint(); }

 private:
  CVector<Real> amplitudes_;
  int qubits_ = 0;
};

/// Density operator: Hermitian, unit trace, positive semidefinite.
template <typename Real = double>
class BasicDensityOp {
 public:
  explicit BasicDensityOp(const CMatrix<Real>& matrix) : matrix_(detail::symmetrized(matrix, "density operator")) {
    qubits_ = detail::qubit_count(matrix_.rows());
    if (!(std::abs(matrix_.trace().real() - Real(1)) <= Real(qtol::kTrace)))
      throw InvariantError("density operator: trace differs from 1");
    if (detail::hermitian_eigenvalues(matrix_).minCoeff() < -Real(qtol::kPsd))
      throw InvariantError("density operator: negative eigenvalue");
  }

  explicit BasicDensityOp(const BasicKet<Real>& ket) : BasicDensityOp(ket.projector()) {}

  const CMatrix<Real>& matrix() const { return matrix_; }
  Eigen::Index dim() const { return matrix_.rows(); }
  int qubits() const { return qubits_; }

 private:
  CMatrix<Real> matrix_;
  int qubits_ = 0;
};

/// Single-party self-adjoint contraction, tagged with the party it acts on.
template <typename Real = double>
class BasicObservable {
 public:
  BasicObservable(const CMatrix<Real>& matrix, int party, std::string label = {})
      : matrix_(detail::symmetrized(matrix, "observable")), party_(party), label_(std::move(label)) {
    const auto ev = detail::hermitian_eigenvalues(matrix_);
    if (ev.minCoeff() < Real(-1) - Real(qtol::kSpectrum) || ev.maxCoeff() > Real(1) + Real(qtol::kSpectrum))
      throw InvariantError("observable: spectrum outside [-1,1]");
    if (party < 0) throw DimensionError("observable: negative party index");
  }

  const CMatrix<Real>& matrix() const { return matrix_; }
  int party() const { return party_; }
  const std::string& label() const { return label_; }

  /// O^2 = I within 1e-10, so (I +- O)/2 are projectors.
  bool is_binary() const {
    const auto id = CMatrix<Real>::Identity(matrix_.rows(), matrix_.cols());
    return (matrix_ * matrix_ - id).cwiseAbs().maxCoeff() <= Real(qtol::kSpectrum);
  }

  /// Projector onto outcome label 0 (+1) or 1 (-1).
  CMatrix<Real> projector(int outcome) const {
    const auto id = CMatrix<Real>::Identity(matrix_.rows(), matrix_.cols());
    return (outcome == 0 ? CMatrix<Real>(id + matrix_) : CMatrix<Real>(id - matrix_)) / Real(2);
  }

 private:
  CMatrix<Real> matrix_;
  int party_ = 0;
  std::string label_;
};

template <typename Real = double>
using BasicState = std::variant<BasicKet<Real>, BasicDensityOp<Real>>;

/// A state on n qubits and, for each party, its two binary observables.
template <typename Real = double>
struct BasicQuantumStrategy {
  BasicState<Real> state;
  std::vector<std::array<BasicObservable<Real>, 2>> observables;

  int parties() const { return static_cast<int>(observables.size()); }
};

using Ket = BasicKet<double>;
using DensityOp = BasicDensityOp<double>;
using Observable = BasicObservable<double>;
using QuantumState = BasicState<double>;
using QuantumStrategy = BasicQuantumStrategy<double>;

// ---------------------------------------------------------------------------
// Elementary operators

template <typename Real = double>
CMatrix<Real> pauli_identity() {
  return CMatrix<Real>::Identity(2, 2);
}

template <typename Real = double>
CMatrix<Real> pauli_x() {
  CMatrix<Real> m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

template <typename Real = double>
CMatrix<Real> pauli_y() {
  using C = std::complex<Real>;
  CMatrix<Real> m(2, 2);
  m << C(0), C(0, -1), C(0, 1), C(0);
  return m;
}

template <typename Real = double>
CMatrix<Real> pauli_z() {
  CMatrix<Real> m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

/// Kronecker product a (x) b; `a` is the more significant factor.
template <typename Real>
CMatrix<Real> tensor(const CMatrix<Real>& a, const CMatrix<Real>& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols()) throw DimensionError("tensor: operands must be square");
  return Eigen::kroneckerProduct(a, b).eval();
}

/// I (x) ... (x) op (x) ... (x) I with `op` on qubit `party` of `qubits`.
template <typename Real>
CMatrix<Real> embed(const CMatrix<Real>& op, int party, int qubits) {
  if (op.rows() != 2 || op.cols() != 2) throw DimensionError("embed: expected a single-qubit operator");
  if (party < 0 || party >= qubits) throw DimensionError("embed: party outside the register");
  CMatrix<Real> out = CMatrix<Real>::Identity(1, 1);
  for (int q = 0; q < qubits; ++q) out = tensor<Real>(out, q == party ? op : pauli_identity<Real>());
  return out;
}

template <typename Real>
Eigen::Index state_dim(const BasicState<Real>& s) {
  return std::visit([](const auto& v) { return v.dim(); }, s);
}

template <typename Real>
int state_qubits(const BasicState<Real>& s) {
  return std::visit([](const auto& v) { return v.qubits(); }, s);
}

template <typename Real>
std::complex<Real> raw_expectation(const BasicState<Real>& state, const CMatrix<Real>& op) {
  if (op.rows() != state_dim(state) || op.cols() != state_dim(state))
    throw DimensionError("expectation: operator dimension does not match state");
  if (const auto* ket = std::get_if<BasicKet<Real>>(&state))
    return ket->amplitudes().dot(op * ket->amplitudes());
  return (std::get<BasicDensityOp<Real>>(state).matrix() * op).trace();
}

/// Tr(rho O). Throws when the imaginary part exceeds 1e-8, which signals a
/// non-Hermitian operator.
template <typename Real>
Real expectation(const BasicState<Real>& state, const CMatrix<Real>& op) {
  const auto v = raw_expectation(state, op);
  if (!(std::abs(v.imag()) <= Real(qtol::kImaginary)))
    throw InvariantError("expectation: imaginary part indicates a non-Hermitian operator");
  return v.real();
}

template <typename Real>
Real expectation(const BasicKet<Real>& state, const CMatrix<Real>& op) {
  return expectation(BasicState<Real>(state), op);
}

template <typename Real>
Real expectation(const BasicDensityOp<Real>& state, const CMatrix<Real>& op) {
  return expectation(BasicState<Real>(state), op);
}

// ---------------------------------------------------------------------------
// States

/// (|00> + |11>)/sqrt(2).
template <typename Real = double>
BasicKet<Real> bell_state() {
  CVector<Real> v = CVector<Real>::Zero(4);
  v(0) = v(3) = Real(1) / std::sqrt(Real(2));
  return BasicKet<Real>(v);
}

/// eta |Phi2><Phi2| + (1 - eta) I/4.
template <typename Real = double>
BasicDensityOp<Real> werner_state(Real eta) {
  if (!(eta >= Real(0) && eta <= Real(1))) throw DomainError("werner_state: eta must lie in [0,1]");
  const CMatrix<Real> rho = eta * bell_state<Real>().projector() + (Real(1) - eta) * CMatrix<Real>::Identity(4, 4) / Real(4);
  return BasicDensityOp<Real>(rho);
}

/// (cos(theta)|110> + sin(theta)|101> + |011>)/sqrt(2) on three qubits.
template <typename Real = double>
BasicKet<Real> tightness_state(Real theta) {
  if (!(theta >= Real(0) && theta <= std::numbers::pi_v<Real> / Real(2) + Real(1e-15)))
    throw DomainError("tightness_state: theta must lie in [0, pi/2]");
  CVector<Real> v = CVector<Real>::Zero(8);
  const Real r = Real(1) / std::sqrt(Real(2));
  v(0b110) = r * std::cos(theta);
  v(0b101) = r * std::sin(theta);
  v(0b011) = r;
  return BasicKet<Real>(v);
}

/// Partial trace keeping the listed qubits (ascending).
template <typename Real>
CMatrix<Real> partial_trace(const CMatrix<Real>& rho, const std::vector<int>& keep) {
  const int n = detail::qubit_count(rho.rows());
  std::vector<int> trace_out;
  for (int q = 0; q < n; ++q)
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) trace_out.push_back(q);
  const Eigen::Index dk = Eigen::Index(1) << keep.size();
  const Eigen::Index dt = Eigen::Index(1) << trace_out.size();
  auto compose = [&](Eigen::Index k, Eigen::Index t) {
    Eigen::Index idx = 0;
    for (int q = 0; q < n; ++q) {
      const auto kp = std::find(keep.begin(), keep.end(), q);
      int bit;
      if (kp != keep.end()) {
        const auto pos = static_cast<int>(kp - keep.begin());
        bit = static_cast<int>((k >> (static_cast<int>(keep.size()) - 1 - pos)) & 1);
      } else {
        const auto pos = static_cast<int>(std::find(trace_out.begin(), trace_out.end(), q) - trace_out.begin());
        bit = static_cast<int>((t >> (static_cast<int>(trace_out.size()) - 1 - pos)) & 1);
      }
      idx = (idx << 1) | bit;
    }
    return idx;
  };
  CMatrix<Real> out = CMatrix<Real>::Zero(dk, dk);
  for (Eigen::Index i = 0; i < dk; ++i)
    for (Eigen::Index j = 0; j < dk; ++j)
      for (Eigen::Index t = 0; t < dt; ++t) out(i, j) += rho(compose(i, t), compose(j, t));
  return out;
}

/// sqrt(<psi|rho|psi>), the fidelity with a pure target.
template <typename Real>
Real fidelity_with_pure(const BasicDensityOp<Real>& rho, const BasicKet<Real>& psi) {
  if (rho.dim() != psi.dim()) throw DimensionError("fidelity: dimension mismatch");
  const Real overlap = psi.amplitudes().dot(rho.matrix() * psi.amplitudes()).real();
  return std::sqrt(std::clamp(overlap, Real(0), Real(1)));
}

// ---------------------------------------------------------------------------
// CHSH

/// <A0 B0> + <A0 B1> + <A1 B0> - <A1 B1> with single-qubit observables placed
/// on qubits `party_a` and `party_b` of the state's register.
template <typename Real>
Real chsh_score(const BasicState<Real>& state, const CMatrix<Real>& a0, const CMatrix<Real>& a1,
                const CMatrix<Real>& b0, const CMatrix<Real>& b1, int party_a, int party_b) {
  if (party_a == party_b) throw DimensionError("chsh_score: parties must differ");
  const int n = state_qubits(state);
  const std::array<CMatrix<Real>, 2> as{embed<Real>(a0, party_a, n), embed<Real>(a1, party_a, n)};
  const std::array<CMatrix<Real>, 2> bs{embed<Real>(b0, party_b, n), embed<Real>(b1, party_b, n)};
  Real s = 0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const CMatrix<Real> ab = as[static_cast<std::size_t>(x)] * bs[static_cast<std::size_t>(y)];
      s += (x == 1 && y == 1 ? Real(-1) : Real(1)) * expectation(state, ab);
    }
  return s;
}

template <typename Real>
Real chsh_score(const BasicState<Real>& state, const BasicObservable<Real>& a0, const BasicObservable<Real>& a1,
                const BasicObservable<Real>& b0, const BasicObservable<Real>& b1) {
  if (a0.party() != a1.party() || b0.party() != b1.party())
    throw DimensionError("chsh_score: each pair of observables must share a party");
  return chsh_score(state, a0.matrix(), a1.matrix(), b0.matrix(), b1.matrix(), a0.party(), b0.party());
}

/// Observables (A0, A1, B0, B1) reaching 2 sqrt(2) on (|00>+|11>)/sqrt(2):
/// A = (sx, sy), B = ((sx - sy)/sqrt2, (sx + sy)/sqrt2).
template <typename Real = double>
std::array<CMatrix<Real>, 4> bell_chsh_settings() {
  const Real r = Real(1) / std::sqrt(Real(2));
  return {pauli_x<Real>(), pauli_y<Real>(), CMatrix<Real>(r * (pauli_x<Real>() - pauli_y<Real>())),
          CMatrix<Real>(r * (pauli_x<Real>() + pauli_y<Real>()))};
}

/// Observables (A0, A1, B0 = C0, B1 = C1) of the quarter-circle construction:
/// A = (sx, sy), B = C = ((sx + sy)/sqrt2, (sx - sy)/sqrt2).
template <typename Real = double>
std::array<CMatrix<Real>, 4> tightness_settings() {
  const Real r = Real(1) / std::sqrt(Real(2));
  return {pauli_x<Real>(), pauli_y<Real>(), CMatrix<Real>(r * (pauli_x<Real>() + pauli_y<Real>())),
          CMatrix<Real>(r * (pauli_x<Real>() - pauli_y<Real>()))};
}

/// Two-party strategy: given state with Bell-optimal observables.
template <typename Real = double>
BasicQuantumStrategy<Real> bell_strategy(BasicState<Real> state) {
  const auto s = bell_chsh_settings<Real>();
  return BasicQuantumStrategy<Real>{
      std::move(state),
      {std::array<BasicObservable<Real>, 2>{BasicObservable<Real>(s[0], 0, "A0"), BasicObservable<Real>(s[1], 0, "A1")},
       std::array<BasicObservable<Real>, 2>{BasicObservable<Real>(s[2], 1, "B0"), BasicObservable<Real>(s[3], 1, "B1")}}};
}

template <typename Real = double>
BasicQuantumStrategy<Real> bell_strategy() {
  return bell_strategy<Real>(BasicState<Real>(bell_state<Real>()));
}

// ---------------------------------------------------------------------------
// Born rule

/// Full behavior P(x_1..x_n | t_1..t_n) = Tr[rho (x)_i (I + (-1)^{x_i} O_{t_i})/2]
/// over all n parties of the strategy, one qubit per party.
template <typename Real>
Behavior born_behavior(const BasicQuantumStrategy<Real>& strategy) {
  const int n = strategy.parties();
  if (n < 1) throw DimensionError("born_behavior: strategy has no parties");
  if (state_qubits(strategy.state) != n) throw DimensionError("born_behavior: one qubit per party expected");
  for (int i = 0; i < n; ++i)
    for (const auto& o : strategy.observables[static_cast<std::size_t>(i)]) {
      if (o.party() != i) throw DimensionError("born_behavior: observable tagged with the wrong party");
      if (o.matrix().rows() != 2) throw DimensionError("born_behavior: qubit observables expected");
      if (!o.is_binary()) throw InvariantError("born_behavior: observable is not projective (O^2 != I)");
    }
  const std::vector<int> alph(static_cast<std::size_t>(n), 2);
  const auto rows = radix_product(alph);
  Eigen::MatrixXd table(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto t = decode_mixed_radix(r, alph);
    for (std::size_t c = 0; c < rows; ++c) {
      const auto x = decode_mixed_radix(c, alph);
      CMatrix<Real> effect = CMatrix<Real>::Identity(1, 1);
      for (int i = 0; i < n; ++i) {
        const auto& o = strategy.observables[static_cast<std::size_t>(i)][static_cast<std::size_t>(t[static_cast<std::size_t>(i)])];
        effect = tensor<Real>(effect, o.projector(x[static_cast<std::size_t>(i)]));
      }
      const Real p = expectation(strategy.state, effect);
      table(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = static_cast<double>(std::max(p, Real(0)));
    }
  }
  return Behavior(alph, alph, std::move(table));
}

}  // namespace shadowcert
