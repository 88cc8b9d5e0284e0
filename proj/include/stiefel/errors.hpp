#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stiefel {

// Base class of everything thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Input block fails an orthonormality precondition.
class NotOrthonormalError : public Error {
 public:
  using Error::Error;
};

// Orthogonal input has determinant -1.
class NotSpecialOrthogonalError : public Error {
 public:
  using Error::Error;
};

// A rotation angle at/near +-pi: the principal matrix logarithm is not
// defined, the input sits at or beyond the cut locus.
class AnglePiError : public Error {
 public:
  using Error::Error;
};

// Coefficient matrix of the symmetric Sylvester equation has a
// nonnegative eigenvalue; unique solvability is lost.
class IndefiniteError : public Error {
 public:
  using Error::Error;
};

class SingularError : public Error {
 public:
  using Error::Error;
};

// Tangent vectors passed to a metric operation live at different base points.
class BaseMismatchError : public Error {
 public:
  using Error::Error;
};

class ZeroTangentError : public Error {
 public:
  using Error::Error;
};

// Invalid solver/experiment configuration (bad time grid, wrong metric for a
// metric-specific solver, malformed sweep range, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Iteration budget exhausted; carries the residuals seen so far.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& what, std::vector<double> history)
      : Error(what), residual_history(std::move(history)) {}

  std::vector<double> residual_history;
};

}  // namespace stiefel
