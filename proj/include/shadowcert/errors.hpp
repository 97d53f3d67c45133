#pragma once

#include <stdexcept>
#include <string>

namespace shadowcert {

/// Operand shapes do not agree (matrix sizes, alphabets, party counts).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A scalar parameter lies outside the documented range.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A value violates a structural invariant (normalization, hermiticity, ...).
class InvariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A behavior's marginal depends on inputs of parties that were summed out.
class SignallingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Some setting pair received no trials; correlator-wise estimation is refused.
class EmptyCellError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The extension set of the requested class is empty (e.g. a nonlocal
/// behavior asked for a classical extension).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An optimizer stopped without a usable answer.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed external input (CSV/JSON files, CLI strings).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace shadowcert
