#pragma once

#include <vector>

#include "bnpmix/bigfloat.hpp"

namespace bnpmix {

/// Triangular table of log C(n, k; sigma), 1 <= k <= n <= n_max, built by
///   C(n+1, k) = (n - k sigma) C(n, k) + sigma C(n, k-1),  C(1, 1) = sigma.
/// Every entry is positive for sigma in (0,1), so the recurrence runs in
/// log space without cancellation.
class GfcTable {
 public:
  /// Throws DomainError for sigma outside (0,1) or n_max < 1.
  GfcTable(double sigma, long n_max);

  double sigma() const { return sigma_; }
  long n_max() const { return n_max_; }
  /// log C(n, k; sigma); -inf outside 1 <= k <= n.
  double log_c(long n, long k) const;
  /// Row n as a vector indexed k = 1..n (element 0 is k = 1).
  std::vector<double> row(long n) const;

  /// Raw triangular storage (row-major, row n has n entries).
  const std::vector<double>& entries() const { return entries_; }
  static GfcTable from_entries(double sigma, long n_max, std::vector<double> entries);

 private:
  GfcTable() = default;
  static std::size_t offset(long n) { return static_cast<std::size_t>((n - 1) * n / 2); }
  double sigma_ = 0.0;
  long n_max_ = 0;
  std::vector<double> entries_;
};

/// log |s(n, k)| (unsigned Stirling numbers of the first kind) for
/// 1 <= k <= n <= n_max: the sigma -> 0 limit of C(n, k; sigma) / sigma^k.
/// Row-major triangular layout as in GfcTable; index with `stirling_index`.
std::vector<double> log_stirling1_table(long n_max);
inline std::size_t stirling_index(long n, long k) { return static_cast<std::size_t>((n - 1) * n / 2 + (k - 1)); }

/// C(n, k; sigma) from the explicit alternating sum
///   (1/k!) sum_{j=0}^{k} (-1)^j binom(k, j) (-j sigma)_n
/// at the precision of `sigma`. Suffers cancellation; intended as a cross-check.
BigFloat gfc_explicit(long n, long k, const BigFloat& sigma);

}  // namespace bnpmix
