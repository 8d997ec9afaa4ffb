#include "bnpmix/bigfloat.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "bnpmix/errors.hpp"

namespace bnpmix {

BigFloat BigFloat::from_string(const std::string& s, Bits bits) {
  BigFloat r(bits);
  if (mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN) != 0) throw DomainError("BigFloat: cannot parse '" + s + "'");
  return r;
}

long double BigFloat::log_abs() const {
  if (mpfr_zero_p(v_)) return -std::numeric_limits<long double>::infinity();
  // Split into mantissa and binary exponent so huge magnitudes do not overflow.
  long exp2 = 0;
  const long double m = mpfr_get_ld_2exp(&exp2, v_, MPFR_RNDN);
  return std::log(std::fabs(m)) + static_cast<long double>(exp2) * std::log(2.0L);
}

double BigFloat::log2_abs() const {
  if (mpfr_zero_p(v_)) return -std::numeric_limits<double>::infinity();
  long exp2 = 0;
  const double m = mpfr_get_d_2exp(&exp2, v_, MPFR_RNDN);
  return std::log2(std::fabs(m)) + static_cast<double>(exp2);
}

std::string BigFloat::to_string(int digits) const {
  std::vector<char> buf(static_cast<std::size_t>(digits) + 64);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", digits, v_);
  return std::string(buf.data());
}

BigFloat& BigFloat::operator+=(const BigFloat& o) {
  widen_to(o);
  mpfr_add(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
BigFloat& BigFloat::operator-=(const BigFloat& o) {
  widen_to(o);
  mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
BigFloat& BigFloat::operator*=(const BigFloat& o) {
  widen_to(o);
  mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
BigFloat& BigFloat::operator/=(const BigFloat& o) {
  widen_to(o);
  mpfr_div(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

BigFloat abs(const BigFloat& x) {
  BigFloat r(x);
  mpfr_abs(r.v_, r.v_, MPFR_RNDN);
  return r;
}
BigFloat exp(const BigFloat& x) {
  BigFloat r(x.precision());
  mpfr_exp(r.v_, x.v_, MPFR_RNDN);
  return r;
}
BigFloat log(const BigFloat& x) {
  BigFloat r(x.precision());
  mpfr_log(r.v_, x.v_, MPFR_RNDN);
  return r;
}
BigFloat pow(const BigFloat& x, const BigFloat& y) {
  BigFloat r(std::max(x.precision(), y.precision()));
  mpfr_pow(r.v_, x.v_, y.v_, MPFR_RNDN);
  return r;
}
BigFloat pow(const BigFloat& x, long y) {
  BigFloat r(x.precision());
  mpfr_pow_si(r.v_, x.v_, y, MPFR_RNDN);
  return r;
}
BigFloat gamma(const BigFloat& x) {
  BigFloat r(x.precision());
  mpfr_gamma(r.v_, x.v_, MPFR_RNDN);
  return r;
}
BigFloat lgamma(const BigFloat& x) {
  BigFloat r(x.precision());
  mpfr_lngamma(r.v_, x.v_, MPFR_RNDN);
  return r;
}

}  // namespace bnpmix
