#pragma once

#include <stdexcept>
#include <string>

namespace gasphs {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition (negative geometry, bad topology, ...).
class InvalidInput : public Error {
public:
  using Error::Error;
};

/// A modelling assumption no longer holds: non-positive pressure, Papay range exceeded.
class ModelValidityError : public Error {
public:
  ModelValidityError(const std::string& what, std::string where = {})
      : Error(where.empty() ? what : what + " (at " + where + ")"), where_(std::move(where)) {}

  /// Identifier of the offending node/edge, empty when not applicable.
  const std::string& where() const noexcept { return where_; }

private:
  std::string where_;
};

/// Iterative method did not converge.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

private:
  double last_residual_;
};

}  // namespace gasphs
