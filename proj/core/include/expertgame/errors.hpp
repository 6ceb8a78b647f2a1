#pragma once

#include <stdexcept>
#include <string>

namespace expertgame {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// History window length exceeds the 2^d enumeration guard.
class WindowTooLarge : public Error {
 public:
  using Error::Error;
};

/// Requested horizon exceeds the selected value engine's budget.
class HorizonTooLarge : public Error {
 public:
  using Error::Error;
};

/// Tree depth exceeds the 2^k enumeration guard.
class DepthTooLarge : public Error {
 public:
  using Error::Error;
};

/// Gradient direction has vanishing mass on the all-ones vector.
class DegenerateGradient : public Error {
 public:
  using Error::Error;
};

/// Running denominator of the block strategy crossed its lower guard.
class DegenerateDenominator : public Error {
 public:
  using Error::Error;
};

/// Diffusion matrix is numerically singular.
class SingularDiffusion : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature failed to stabilize within its order budget.
class QuadratureNotConverged : public Error {
 public:
  using Error::Error;
};

/// A checked analytic precondition of the one-step solve failed.
class PreconditionViolated : public Error {
 public:
  enum class Which {
    root_bracket,     // outer values must bracket the target level
    strict_decrease,  // h1 must decrease strictly, dominating eps*|h2'|
  };

  PreconditionViolated(Which which, const std::string& what)
      : Error(what), which_(which) {}

  Which which() const { return which_; }

 private:
  Which which_;
};

/// Malformed input file; carries the 1-based offending line.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace expertgame
