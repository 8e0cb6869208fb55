#pragma once

#include <stdexcept>
#include <string>

namespace boxcast {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes or lengths that do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Input object violates a type invariant (simplex, PSD, normalization...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class SignallingError : public Error {
 public:
  using Error::Error;
};

class ConditioningError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

// LP or linear-algebra failure. Carries a residual for diagnostics.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual = 0.0)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// Malformed or schema-violating input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Hypothesis of a verifier is not met.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace boxcast
