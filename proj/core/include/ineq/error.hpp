#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace ineq {

// Base of every error the library raises for bad inputs or degenerate data.
// Invariant violations inside the library surface as std::logic_error instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter is outside the domain of the function (T <= 0, alpha <= 1, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class MalformedCurveError : public Error {
 public:
  using Error::Error;
};

class NoIntersectionError : public Error {
 public:
  using Error::Error;
};

// A fit produced parameters that have no physical reading (e.g. a negative
// upper-tail income fraction).
class NonPhysicalFitError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class SingularDiffusionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Unparseable input. line() is 1-based, 0 when the problem is not tied to a line.
class FormatError : public Error {
 public:
  FormatError(std::string source, std::size_t line, const std::string& what)
      : Error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

}  // namespace ineq
