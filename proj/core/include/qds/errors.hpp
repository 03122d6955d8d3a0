#pragma once

#include <stdexcept>
#include <string>

namespace qds {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live on incompatible Hilbert spaces.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument is malformed: non-hermitian Hamiltonian, negative rate,
/// non-positive step, empty grid.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its stated hypotheses
/// (e.g. an H-theorem check on a generator that is not bistochastic).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A numerical contract failed: a map is not completely positive, a
/// spectral matrix is not positive semidefinite, a trace budget was lost.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace qds
