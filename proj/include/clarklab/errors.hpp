#pragma once

#include <stdexcept>
#include <string>

namespace clarklab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Evaluation hit a pole (an atom, a denominator root, a level-set point).
class PoleError : public Error {
public:
  using Error::Error;
};

/// Argument outside the operation's domain (|z| >= 1 for a disk transform, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Newton refinement of a boundary root did not reach tolerance.
class RootPolishError : public Error {
public:
  using Error::Error;
};

/// The secular equation lost its interlacing structure numerically.
class BracketingError : public Error {
public:
  double lower;
  double upper;

  BracketingError(const std::string& what, double lo, double hi)
      : Error(what + " on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]"),
        lower(lo),
        upper(hi) {}
};

/// K'(x) too small to turn a residue into a mass.
class DerivativeTooSmallError : public Error {
public:
  using Error::Error;
};

/// A Clark level set collided (alpha is numerically a critical value).
class CriticalValueError : public Error {
public:
  using Error::Error;
};

/// Invalid construction data (non-positive mass, zero outside the disk, ...).
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// A dense eigensolver did not converge.
class EigensolverError : public Error {
public:
  using Error::Error;
};

/// A vector failed the Krylov cyclicity test.
class CyclicityError : public Error {
public:
  using Error::Error;
};

/// Adaptive quadrature gave up before reaching its target.
class QuadratureError : public Error {
public:
  using Error::Error;
};

/// A linear system was too ill-conditioned to trust.
class ConditioningError : public Error {
public:
  double condition_number;

  ConditioningError(const std::string& what, double cond)
      : Error(what + " (condition number " + std::to_string(cond) + ")"), condition_number(cond) {}
};

}  // namespace clarklab
