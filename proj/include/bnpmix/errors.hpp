#pragma once

#include <stdexcept>
#include <string>

namespace bnpmix {

/// Invalid parameter or argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// High-precision evaluation did not reach the requested accuracy; retry with more bits.
class PrecisionError : public std::runtime_error {
 public:
  explicit PrecisionError(const std::string& what) : std::runtime_error(what) {}
};

/// Root-finding endpoints do not bracket the target.
class BracketError : public std::runtime_error {
 public:
  explicit BracketError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure inside the sampler (degenerate covariance and the like).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bnpmix
