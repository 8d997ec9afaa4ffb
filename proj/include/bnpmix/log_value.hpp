#pragma once

#include <cmath>
#include <limits>

namespace bnpmix {

/// Nonnegative real stored as its logarithm; zero is an explicit flag.
class LogValue {
 public:
  LogValue() = default;

  static LogValue from_log(long double log_magnitude) {
    LogValue v;
    if (std::isinf(log_magnitude) && log_magnitude < 0) return zero();
    v.log_ = log_magnitude;
    v.zero_ = false;
    return v;
  }
  static LogValue from_value(long double x) {
    if (x == 0) return zero();
    return from_log(std::log(x));
  }
  static LogValue zero() {
    LogValue v;
    v.zero_ = true;
    v.log_ = -std::numeric_limits<long double>::infinity();
    return v;
  }

  bool is_zero() const { return zero_; }
  /// -inf for zero.
  long double log() const { return log_; }
  long double value() const { return zero_ ? 0.0L : std::exp(log_); }

  friend LogValue operator*(LogValue a, LogValue b) {
    if (a.zero_ || b.zero_) return zero();
    return from_log(a.log_ + b.log_);
  }
  friend LogValue operator/(LogValue a, LogValue b) {
    if (a.zero_) return zero();
    return from_log(a.log_ - b.log_);
  }

 private:
  long double log_ = 0.0L;
  bool zero_ = false;
};

}  // namespace bnpmix
