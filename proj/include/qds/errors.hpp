#pragma once

#include <stdexcept>
#include <string>

namespace qds {

// All library failures derive from qds::Error so callers can map them onto
// exit codes without string matching.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes that do not fit together (ragged Kraus lists, wrong operand size).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Input that is well-formed but violates a numerical precondition
// (non-Hermitian, non-PSD, non-orthonormal, non-TP where TP is required).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A subspace was required to be invariant and is not.
class NotInvariantError : public PreconditionError {
 public:
  NotInvariantError(const std::string& what, double residual)
      : PreconditionError(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// A subspace was required to be globally asymptotically stable and is not.
class NotGasError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// Two routes that must agree did not; this is a tolerance or logic bug,
// never a property of the input.
class InternalInconsistencyError : public Error {
 public:
  using Error::Error;
};

// The PSD part of a generalized eigenspace could not be located.
class NumericalDegeneracyError : public Error {
 public:
  using Error::Error;
};

// Generator parameters outside the admissible region.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

// Malformed input files or specs.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace qds
