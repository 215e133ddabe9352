#pragma once

#include <stdexcept>
#include <string>

namespace graspsim {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument: dimension mismatch, out-of-range value, inconsistent spec.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// Mass matrix numerically singular (reciprocal condition estimate below
/// threshold). Signals a broken model, never a valid one.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// Integration produced a non-finite state entry.
class DivergenceError : public Error {
 public:
  DivergenceError(double blow_up_time, std::string what)
      : Error(std::move(what)), blow_up_time_(blow_up_time) {}

  /// Time of the first step whose result was non-finite.
  double blow_up_time() const { return blow_up_time_; }

 private:
  double blow_up_time_;
};

/// Scenario text could not be parsed; carries line/key diagnostics.
class ParseError : public Error {
 public:
  ParseError(int line, std::string key, std::string what)
      : Error(std::move(what)), line_(line), key_(std::move(key)) {}

  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

/// An operation's mathematical precondition does not hold (e.g. final value
/// theorem applied to an unstable transfer function).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace graspsim
