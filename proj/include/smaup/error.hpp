#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace smaup {

// Base of every error the library throws. The CLI maps the subclasses onto
// exit codes: InputError -> 2, NumericalError -> 3, StallError -> 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments, shapes, or configuration.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. `line` is 1-based, 0 when not line-oriented.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : InputError(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Input for which the requested quantity is undefined (zero variance,
/// zero mean in a ratio, constant field).
class DegenerateInputError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A Monte Carlo acceptance loop whose acceptance rate collapsed.
class StallError : public Error {
 public:
  StallError(const std::string& what, double rate)
      : Error(what), rate_(rate) {}
  double rate() const noexcept { return rate_; }

 private:
  double rate_;
};

}  // namespace smaup
