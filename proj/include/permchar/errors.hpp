#pragma once

#include <stdexcept>
#include <string>

namespace permchar {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Out-of-domain numeric parameter (theta <= 0, r outside (0,1), ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Malformed input data (negative weights, non-unit entries, empty vectors).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Operation undefined for this input, e.g. projecting a matrix with eigenvalue 1.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A normalizing denominator is numerically zero.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, double bound) : Error(what), bound_(bound) {}
  double bound() const noexcept { return bound_; }

 private:
  double bound_;
};

}  // namespace permchar
