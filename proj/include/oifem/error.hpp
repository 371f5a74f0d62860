#pragma once

#include <stdexcept>
#include <string>

namespace oifem {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An exponential-type law was evaluated beyond its representable range.
class OverflowError : public Error {
public:
  using Error::Error;
};

/// The supremum defining a convex conjugate is infinite.
class DivergenceError : public Error {
public:
  using Error::Error;
};

/// Malformed mesh or configuration input. Carries the offending line (1-based, 0 if unknown).
class ParseError : public Error {
public:
  ParseError(const std::string &what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  int line() const noexcept { return line_; }

private:
  int line_;
};

} // namespace oifem
