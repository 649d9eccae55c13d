#pragma once

#include <stdexcept>
#include <string>

namespace dlab {

/// Base of every error raised by the library. The CLI maps the two
/// subclasses onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied input that violates an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The computation itself failed (non-finite value, divergence, a zero on
/// a contour, no convergence).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace dlab
