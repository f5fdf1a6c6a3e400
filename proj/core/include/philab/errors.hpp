#pragma once

#include <stdexcept>
#include <string>

namespace philab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value left the representable range; the message names the offending input.
class OverflowError : public Error {
 public:
  using Error::Error;
};

// A precondition on arguments was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

// An iterative numeric routine did not reach its tolerance.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

class UnboundedConjugateError : public Error {
 public:
  using Error::Error;
};

// Configuration problems; line is 0 when not tied to a source line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace philab
