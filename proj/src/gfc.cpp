#include "bnpmix/gfc.hpp"

#include <cmath>
#include <limits>

#include "bnpmix/errors.hpp"
#include "bnpmix/special.hpp"

namespace bnpmix {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

GfcTable::GfcTable(double sigma, long n_max) : sigma_(sigma), n_max_(n_max) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw DomainError("gfc_table: sigma must be in (0,1)");
  if (n_max < 1) throw DomainError("gfc_table: n_max must be >= 1");
  entries_.assign(offset(n_max + 1), kNegInf);
  const double log_sigma = std::log(sigma);
  entries_[0] = log_sigma;
  for (long n = 1; n < n_max; ++n) {
    const std::size_t cur = offset(n);
    const std::size_t next = offset(n + 1);
    for (long k = 1; k <= n + 1; ++k) {
      double stay = kNegInf;
      if (k <= n) stay = std::log(static_cast<double>(n) - static_cast<double>(k) * sigma) + entries_[cur + k - 1];
      double open = kNegInf;
      if (k >= 2) open = log_sigma + entries_[cur + k - 2];
      entries_[next + k - 1] = log_add_exp(stay, open);
    }
  }
}

GfcTable GfcTable::from_entries(double sigma, long n_max, std::vector<double> entries) {
  if (entries.size() != offset(n_max + 1)) throw DomainError("GfcTable::from_entries: size mismatch");
  GfcTable t;
  t.sigma_ = sigma;
  t.n_max_ = n_max;
  t.entries_ = std::move(entries);
  return t;
}

double GfcTable::log_c(long n, long k) const {
  if (n < 1 || k < 1 || k > n) return kNegInf;
  if (n > n_max_) throw DomainError("GfcTable: n exceeds table size");
  return entries_[offset(n) + static_cast<std::size_t>(k - 1)];
}

std::vector<double> GfcTable::row(long n) const {
  if (n < 1 || n > n_max_) throw DomainError("GfcTable::row: n out of range");
  const auto first = entries_.begin() + static_cast<std::ptrdiff_t>(offset(n));
  return std::vector<double>(first, first + n);
}

std::vector<double> log_stirling1_table(long n_max) {
  if (n_max < 1) throw DomainError("log_stirling1_table: n_max must be >= 1");
  std::vector<double> t(stirling_index(n_max + 1, 1), kNegInf);
  t[0] = 0.0;  // |s(1,1)| = 1
  for (long n = 1; n < n_max; ++n) {
    for (long k = 1; k <= n + 1; ++k) {
      // |s(n+1,k)| = n |s(n,k)| + |s(n,k-1)|
      const double stay = k <= n ? std::log(static_cast<double>(n)) + t[stirling_index(n, k)] : kNegInf;
      const double open = k >= 2 ? t[stirling_index(n, k - 1)] : kNegInf;
      t[stirling_index(n + 1, k)] = log_add_exp(stay, open);
    }
  }
  return t;
}

BigFloat gfc_explicit(long n, long k, const BigFloat& sigma) {
  if (k < 0 || n < 0) throw DomainError("gfc_explicit: negative index");
  const auto bits = sigma.precision();
  BigFloat sum(bits);
  BigFloat binom(1.0, bits);
  for (long j = 0; j <= k; ++j) {
    if (j > 0) {
      binom *= (k - j + 1);
      binom /= j;
    }
    // (-j sigma)_n
    BigFloat x = -(sigma * j);
    BigFloat poch(1.0, bits);
    for (long t = 0; t < n; ++t) poch *= x + BigFloat::from_long(t, bits);
    BigFloat term = binom * poch;
    if (j % 2 == 1) sum -= term;
    else sum += term;
  }
  for (long j = 2; j <= k; ++j) sum /= j;
  return sum;
}

}  // namespace bnpmix
