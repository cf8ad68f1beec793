#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gwr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A constraint-relevant pair of agents is closer than the separation guard,
/// so a cosine in F_W is undefined.
class DegenerateConfiguration : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidPrecondition : public Error {
 public:
  using Error::Error;
};

class NotGIWR : public Error {
 public:
  using Error::Error;
};

class NotCollinear : public Error {
 public:
  using Error::Error;
};

class NoRealRoot : public Error {
 public:
  using Error::Error;
};

/// Both roots of the scale-recovery quadratic are admissible.
class AmbiguousRoot : public Error {
 public:
  AmbiguousRoot(const std::string& what, double low, double high)
      : Error(what), roots_{low, high} {}
  const std::vector<double>& roots() const noexcept { return roots_; }

 private:
  std::vector<double> roots_;
};

/// Scenario file could not be parsed or validated. `line` is 1-based, 0 when
/// no source position is known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0) : Error(what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace gwr
