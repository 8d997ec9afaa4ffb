#include "bnpmix/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bnpmix/errors.hpp"

namespace bnpmix {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Below this length the product is summed term by term; lgamma differences lose
// relative accuracy when x is large and n is small.
constexpr long kDirectPochhammer = 64;
}  // namespace

double log_pochhammer(double x, long n) {
  if (!(x > 0.0)) throw DomainError("log_pochhammer: x must be > 0, got " + std::to_string(x));
  if (n < 0) throw DomainError("log_pochhammer: n must be >= 0");
  if (n == 0) return 0.0;
  if (n <= kDirectPochhammer) {
    double s = 0.0;
    for (long i = 0; i < n; ++i) s += std::log(x + static_cast<double>(i));
    return s;
  }
  return std::lgamma(x + static_cast<double>(n)) - std::lgamma(x);
}

double log_factorial(long n) {
  if (n < 0) throw DomainError("log_factorial: negative argument");
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_binomial(long n, long k) {
  if (k < 0 || k > n) return kNegInf;
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double log_sum_exp(std::span<const double> v) {
  if (v.empty()) return kNegInf;
  const double m = *std::max_element(v.begin(), v.end());
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (std::isinf(a)) return a;
  return a + std::log1p(std::exp(b - a));
}

std::vector<double> log_convolve(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, kNegInf);
  std::vector<double> terms;
  for (std::size_t m = 0; m < out.size(); ++m) {
    terms.clear();
    const std::size_t lo = m >= b.size() ? m - b.size() + 1 : 0;
    const std::size_t hi = std::min(m, a.size() - 1);
    for (std::size_t i = lo; i <= hi; ++i) terms.push_back(a[i] + b[m - i]);
    out[m] = log_sum_exp(terms);
  }
  return out;
}

}  // namespace bnpmix
