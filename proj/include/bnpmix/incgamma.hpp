#pragma once

#include <vector>

#include "bnpmix/bigfloat.hpp"

namespace bnpmix {

/// Upper incomplete gamma Gamma(a, x) = int_x^inf s^{a-1} e^{-s} ds for real
/// shape a (any sign) and x > 0, evaluated at the precision of `x`.
///
/// For a > x + 1 the series for the lower function is subtracted from
/// Gamma(a); otherwise the Legendre continued fraction is used, except for
/// x < 1 where MPFR's mpfr_gamma_inc is faster. Relative
/// accuracy targets roughly the full working precision; a PrecisionError is
/// raised if the continued fraction fails to converge.
BigFloat upper_incomplete_gamma(const BigFloat& a, const BigFloat& x);

/// Gamma(a0 - j, x) for j = 0..count-1, computed from a direct evaluation at
/// a0 followed by the downward recurrence
///   Gamma(a - 1, x) = (Gamma(a, x) - x^{a-1} e^{-x}) / (a - 1).
/// Shapes within 1/2 of zero are re-seeded directly. The recurrence loses at
/// most about x*log2(e) bits across the region |a| < x; see
/// `ladder_guard_bits`.
std::vector<BigFloat> incomplete_gamma_ladder(const BigFloat& a0, long count, const BigFloat& x);

/// Extra working bits needed by `incomplete_gamma_ladder` at lower limit x.
long ladder_guard_bits(double x);

}  // namespace bnpmix
