#pragma once

#include <stdexcept>
#include <string>

namespace frdiag {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (Im z <= 0, u out of range, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The operation is undefined for a Dirac mass.
class DegenerateMeasure : public DomainError {
 public:
  using DomainError::DomainError;
};

class ScalarOperand : public DomainError {
 public:
  using DomainError::DomainError;
};

class ThresholdExceeded : public DomainError {
 public:
  using DomainError::DomainError;
};

class Unsupported : public DomainError {
 public:
  using DomainError::DomainError;
};

class EmptySample : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Recovered mass of a Stieltjes inversion is too far from one.
class MassDefect : public DomainError {
 public:
  using DomainError::DomainError;
};

/// An iterative solver did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class SingularDraw : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

/// A quantity that must be monotone decreased; signals a solver bug.
class MonotonicityViolation : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

}  // namespace frdiag
