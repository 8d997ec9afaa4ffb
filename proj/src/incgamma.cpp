#include "bnpmix/incgamma.hpp"

#include <cmath>
#include <string>

#include "bnpmix/errors.hpp"

namespace bnpmix {

namespace {

BigFloat power_of_two(long e, BigFloat::Bits bits) {
  BigFloat r(1.0, bits);
  mpfr_mul_2si(r.raw(), r.raw(), e, MPFR_RNDN);
  return r;
}

// Gamma(a) - gamma(a, x) with the lower function from its power series; a > x + 1 > 0.
BigFloat incgamma_series(const BigFloat& a, const BigFloat& x) {
  const auto bits = std::max(a.precision(), x.precision());
  const BigFloat eps = power_of_two(-(bits + 8), bits);
  BigFloat term(1.0, bits);
  BigFloat sum(1.0, bits);
  BigFloat denom(a);
  for (long j = 1;; ++j) {
    denom += BigFloat(1.0, bits);
    term *= x;
    term /= denom;
    sum += term;
    if (abs(term) < sum * eps) break;
    if (j > 50 * bits + 100000) throw PrecisionError("incomplete gamma series failed to converge");
  }
  BigFloat lower = exp(a * log(x) - x) / a * sum;
  BigFloat full = gamma(a);
  full -= lower;
  return full;
}

// Legendre continued fraction (modified Lentz); valid for all real a when x > 0.
BigFloat incgamma_cf(const BigFloat& a, const BigFloat& x) {
  const auto bits = std::max(a.precision(), x.precision());
  const BigFloat one(1.0, bits);
  const BigFloat eps = power_of_two(-(bits + 4), bits);
  const BigFloat tiny = power_of_two(-4 * bits - 64, bits);
  const BigFloat two(2.0, bits);

  BigFloat b = x + one - a;
  BigFloat c = one / tiny;
  BigFloat d = b.is_zero() ? one / tiny : one / b;
  BigFloat h = d;
  const long max_iter = 200 * bits + 1000000;
  for (long i = 1;; ++i) {
    // an = -i (i - a)
    BigFloat an = BigFloat::from_long(i, bits) - a;
    an *= -i;
    b += two;
    d = an * d + b;
    if (d.is_zero()) d = tiny;
    c = b + an / c;
    if (c.is_zero()) c = tiny;
    d = one / d;
    BigFloat delta = d * c;
    h *= delta;
    if (abs(delta - one) < eps) break;
    if (i > max_iter) throw PrecisionError("incomplete gamma continued fraction failed to converge");
  }
  return exp(a * log(x) - x) * h;
}

}  // namespace

BigFloat upper_incomplete_gamma(const BigFloat& a, const BigFloat& x) {
  if (!(x.sign() > 0)) throw DomainError("upper_incomplete_gamma: x must be > 0");
  const auto bits = std::max(a.precision(), x.precision());
  BigFloat aa(a);
  aa.round_to(bits);
  BigFloat xx(x);
  xx.round_to(bits);
  if (aa > xx + BigFloat(1.0, bits)) return incgamma_series(aa, xx);
  // The continued fraction needs O(1/x) terms; MPFR's own routine is fast here.
  if (xx < BigFloat(1.0, bits)) {
    BigFloat r(bits);
    mpfr_gamma_inc(r.raw(), aa.raw(), xx.raw(), MPFR_RNDN);
    if (mpfr_nan_p(r.raw())) throw PrecisionError("incomplete gamma: MPFR returned NaN");
    return r;
  }
  return incgamma_cf(aa, xx);
}

std::vector<BigFloat> incomplete_gamma_ladder(const BigFloat& a0, long count, const BigFloat& x) {
  std::vector<BigFloat> out;
  if (count <= 0) return out;
  const auto bits = std::max(a0.precision(), x.precision());
  out.reserve(static_cast<std::size_t>(count));
  BigFloat a(a0);
  a.round_to(bits);
  out.push_back(upper_incomplete_gamma(a, x));
  const BigFloat one(1.0, bits);
  const BigFloat half(0.5, bits);
  // p = x^{a-1} e^{-x}
  BigFloat p = exp((a - one) * log(x) - x);
  for (long j = 1; j < count; ++j) {
    BigFloat am1 = a - one;
    if (abs(am1) < half) {
      out.push_back(upper_incomplete_gamma(am1, x));
    } else {
      BigFloat g = out.back();
      g -= p;
      g /= am1;
      out.push_back(std::move(g));
    }
    a = std::move(am1);
    p /= x;
  }
  return out;
}

long ladder_guard_bits(double x) {
  return static_cast<long>(std::ceil(std::max(x, 0.0) * 1.4426950408889634)) + 64;
}

}  // namespace bnpmix
