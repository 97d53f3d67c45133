#pragma once

// Random instances for verification corpora. Every generator takes the
// engine by reference so callers control seeding and stream splitting.

#include "shadowcert/behaviors.hpp"
#include "shadowcert/qkernel.hpp"

#include <random>

namespace shadowcert {

/// Engine seeded from `seed` through splitmix64.
std::mt19937_64 make_engine(std::uint64_t seed);

/// Uniform point of the probability simplex (flat Dirichlet).
Eigen::VectorXd random_simplex(std::mt19937_64& gen, Eigen::Index size);

/// The 8 extremal nonlocal boxes of the binary two-party no-signalling
/// polytope: x1 xor x2 = t1 t2 xor (a t1) xor (b t2) xor c.
Behavior pr_box(int a, int b, int c);

/// Random convex mixture of all 24 vertices of the binary two-party
/// no-signalling polytope (16 deterministic, 8 nonlocal boxes).
Behavior random_no_signalling_behavior(std::mt19937_64& gen);

/// LHV model with `hidden` values and random stochastic responses for
/// `parties` parties with binary inputs and outputs. `deterministic`
/// draws each response from the 4 deterministic functions instead.
LhvModel random_lhv_model(std::mt19937_64& gen, int parties = 2, int hidden = 4, bool deterministic = false);

/// Haar-random pure state on `qubits` qubits.
Ket random_ket(std::mt19937_64& gen, int qubits);

/// Random density operator of the given rank (Ginibre construction).
DensityOp random_density(std::mt19937_64& gen, int qubits, int rank);

/// n.sigma for a uniformly random unit vector n.
Observable random_qubit_observable(std::mt19937_64& gen, int party, int label);

/// Projective strategy: random state (pure or mixed) and two random
/// observables per party.
QuantumStrategy random_projective_strategy(std::mt19937_64& gen, int parties, bool mixed);

}  // namespace shadowcert
