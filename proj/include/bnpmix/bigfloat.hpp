#pragma once

#include <mpfr.h>

#include <string>

namespace bnpmix {

/// Owning MPFR value with an explicit mantissa precision.
///
/// Binary operations produce a result at the larger of the two operand
/// precisions, rounded to nearest. There is no global precision state, so
/// values at different precisions can be mixed freely across threads.
class BigFloat {
 public:
  using Bits = mpfr_prec_t;

  explicit BigFloat(Bits bits = 64) { mpfr_init2(v_, bits); mpfr_set_zero(v_, 1); }
  BigFloat(double x, Bits bits) { mpfr_init2(v_, bits); mpfr_set_d(v_, x, MPFR_RNDN); }
  static BigFloat from_long(long x, Bits bits) {
    BigFloat r(bits);
    mpfr_set_si(r.v_, x, MPFR_RNDN);
    return r;
  }
  /// Parse a decimal literal exactly up to the precision (e.g. "0.25", "48.4").
  static BigFloat from_string(const std::string& s, Bits bits);

  BigFloat(const BigFloat& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  BigFloat(BigFloat&& o) noexcept {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_swap(v_, o.v_);
  }
  BigFloat& operator=(const BigFloat& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  BigFloat& operator=(BigFloat&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  Bits precision() const { return mpfr_get_prec(v_); }
  /// Round this value to a new precision in place.
  void round_to(Bits bits) { mpfr_prec_round(v_, bits, MPFR_RNDN); }

  int sign() const { return mpfr_sgn(v_); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  /// log|x| as a long double; -inf for zero.
  long double log_abs() const;
  /// log2|x| as a double (cheap exponent-based magnitude); -inf for zero.
  double log2_abs() const;
  std::string to_string(int digits = 30) const;

  BigFloat& operator+=(const BigFloat& o);
  BigFloat& operator-=(const BigFloat& o);
  BigFloat& operator*=(const BigFloat& o);
  BigFloat& operator/=(const BigFloat& o);
  BigFloat& operator*=(long x) { mpfr_mul_si(v_, v_, x, MPFR_RNDN); return *this; }
  BigFloat& operator/=(long x) { mpfr_div_si(v_, v_, x, MPFR_RNDN); return *this; }

  friend BigFloat operator+(BigFloat a, const BigFloat& b) { return a += b; }
  friend BigFloat operator-(BigFloat a, const BigFloat& b) { return a -= b; }
  friend BigFloat operator*(BigFloat a, const BigFloat& b) { return a *= b; }
  friend BigFloat operator/(BigFloat a, const BigFloat& b) { return a /= b; }
  friend BigFloat operator*(BigFloat a, long b) { return a *= b; }
  friend BigFloat operator/(BigFloat a, long b) { return a /= b; }
  BigFloat operator-() const {
    BigFloat r(*this);
    mpfr_neg(r.v_, r.v_, MPFR_RNDN);
    return r;
  }

  friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
  friend bool operator>(const BigFloat& a, const BigFloat& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
  friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }

  friend BigFloat abs(const BigFloat& x);
  friend BigFloat exp(const BigFloat& x);
  friend BigFloat log(const BigFloat& x);
  friend BigFloat pow(const BigFloat& x, const BigFloat& y);
  friend BigFloat pow(const BigFloat& x, long y);
  friend BigFloat gamma(const BigFloat& x);
  friend BigFloat lgamma(const BigFloat& x);

  /// True when the value is an exact integer.
  bool is_integer() const { return mpfr_integer_p(v_) != 0; }
  long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

 private:
  void widen_to(const BigFloat& o) {
    if (mpfr_get_prec(o.v_) > mpfr_get_prec(v_)) mpfr_prec_round(v_, mpfr_get_prec(o.v_), MPFR_RNDN);
  }
  mpfr_t v_;
};

}  // namespace bnpmix
