#include "shadowcert/random.hpp"

#include "shadowcert/finitedata.hpp"

#include <cmath>

namespace shadowcert {

std::mt19937_64 make_engine(std::uint64_t seed) {
  std::uint64_t state = seed;
  return std::mt19937_64(splitmix64(state));
}

Eigen::VectorXd random_simplex(std::mt19937_64& gen, Eigen::Index size) {
  std::exponential_distribution<double> expo(1.0);
  Eigen::VectorXd w(size);
  for (Eigen::Index i = 0; i < size; ++i) w(i) = expo(gen);
  return w / w.sum();
}

Behavior pr_box(int a, int b, int c) {
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(4, 4);
  for (int t1 = 0; t1 < 2; ++t1)
    for (int t2 = 0; t2 < 2; ++t2) {
      const int parity = (t1 & t2) ^ (a & t1) ^ (b & t2) ^ (c & 1);
      for (int x1 = 0; x1 < 2; ++x1) table(2 * t1 + t2, 2 * x1 + (x1 ^ parity)) = 0.5;
    }
  return Behavior({2, 2}, {2, 2}, std::move(table));
}

Behavior random_no_signalling_behavior(std::mt19937_64& gen) {
  const auto w = random_simplex(gen, 24);
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(4, 4);
  const auto fs = deterministic_functions(2, 2);
  Eigen::Index k = 0;
  for (const auto& f1 : fs)
    for (const auto& f2 : fs) table += w(k++) * deterministic_behavior({2, 2}, {2, 2}, {f1, f2}).table();
  for (int v = 0; v < 8; ++v) table += w(k++) * pr_box(v >> 2, (v >> 1) & 1, v & 1).table();
  for (Eigen::Index r = 0; r < 4; ++r) table.row(r) /= table.row(r).sum();
  return Behavior({2, 2}, {2, 2}, std::move(table));
}

LhvModel random_lhv_model(std::mt19937_64& gen, int parties, int hidden, bool deterministic) {
  LhvModel m;
  m.weights = random_simplex(gen, hidden);
  const auto fs = deterministic_functions(2, 2);
  std::uniform_int_distribution<std::size_t> pick(0, fs.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  m.responses.resize(static_cast<std::size_t>(parties));
  for (auto& table : m.responses)
    for (int l = 0; l < hidden; ++l) {
      if (deterministic) {
        table.push_back(deterministic_response(fs[pick(gen)], 2));
      } else {
        Eigen::MatrixXd r(2, 2);
        for (int t = 0; t < 2; ++t) {
          const double p = unit(gen);
          r(t, 0) = p;
          r(t, 1) = 1.0 - p;
        }
        table.push_back(r);
      }
    }
  return m;
}

namespace {

CVector<double> gaussian_vector(std::mt19937_64& gen, Eigen::Index dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CVector<double> v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = {normal(gen), normal(gen)};
  return v;
}

}  // namespace

Ket random_ket(std::mt19937_64& gen, int qubits) {
  const CVector<double> v = gaussian_vector(gen, Eigen::Index{1} << qubits);
  return Ket(v / v.norm());
}

DensityOp random_density(std::mt19937_64& gen, int qubits, int rank) {
  const Eigen::Index dim = Eigen::Index{1} << qubits;
  CMatrix<double> g(dim, rank);
  for (int k = 0; k < rank; ++k) g.col(k) = gaussian_vector(gen, dim);
  CMatrix<double> rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityOp(rho);
}

Observable random_qubit_observable(std::mt19937_64& gen, int party, int label) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Vector3d n(normal(gen), normal(gen), normal(gen));
  n.normalize();
  const CMatrix<double> o = n(0) * pauli_x<double>() + n(1) * pauli_y<double>() + n(2) * pauli_z<double>();
  const std::string name = std::string(1, static_cast<char>('A' + party)) + std::to_string(label);
  return Observable(o, party, name);
}

QuantumStrategy random_projective_strategy(std::mt19937_64& gen, int parties, bool mixed) {
  QuantumState state = mixed ? QuantumState(random_density(gen, parties, 2)) : QuantumState(random_ket(gen, parties));
  std::vector<std::array<Observable, 2>> obs;
  for (int p = 0; p < parties; ++p)
    obs.push_back({random_qubit_observable(gen, p, 0), random_qubit_observable(gen, p, 1)});
  return QuantumStrategy{std::move(state), std::move(obs)};
}

}  // namespace shadowcert
