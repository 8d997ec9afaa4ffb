#pragma once

#include <vector>

#include "bnpmix/eppf.hpp"
#include "bnpmix/process.hpp"

namespace bnpmix {

enum class CnkMethod { ExactBruteforce, HeuristicArgmax };

struct CnkPoint {
  long n = 0;
  double value = 0.0;
  CnkMethod method = CnkMethod::HeuristicArgmax;
};

struct CnkCurve {
  ProcessSpec spec;
  long k = 0;
  std::vector<CnkPoint> points;

  /// (max - min) / max of c_n(k) over the points with lo <= n <= hi.
  double relative_change(long lo, long hi) const;
};

inline constexpr long kCnkExactMaxN = 30;

/// c_n(k) = (1/n) max_A max_j p(A) / p(B(A, j)) over compositions with k
/// blocks, by enumerating integer partitions of n into k parts and every
/// distinct donor size. Requires k < n <= 30. +inf when p(B) = 0 < p(A);
/// 0 when every p(A) is zero (the 0/0 = 0 convention).
double cnk_exact(const EppfEvaluator& eval, long n, long k);
double cnk_exact(const ProcessSpec& spec, long n, long k, long precision_bits = kDefaultPrecisionBits);

/// c_n(k) at the composition (n-k+1, 1, ..., 1) with the large block as donor.
/// This is the maximizer for Gibbs families and DMP, where the ratio grows with
/// the donor size; for PYM / NGGM it is a heuristic.
double cnk_fast(const EppfEvaluator& eval, long n, long k);
double cnk_fast(const ProcessSpec& spec, long n, long k, long precision_bits = kDefaultPrecisionBits);

/// c_n(k) for every n in `ns` (each > k). Uses cnk_exact where n <= exact_max_n
/// and cnk_fast elsewhere. Points are evaluated in parallel.
CnkCurve cnk_curve(const ProcessSpec& spec, long k, const std::vector<long>& ns, long exact_max_n = 0,
                   long precision_bits = kDefaultPrecisionBits, unsigned threads = 0);

/// V_{n,k} / V_{n,k+1} for each n in `ns` (Gibbs families).
std::vector<double> vnk_ratio_curve(const ProcessSpec& spec, long k, const std::vector<long>& ns,
                                    long precision_bits = kDefaultPrecisionBits);

/// Roughly log-spaced integer grid on [lo, hi] with about `count` points,
/// always including both ends.
std::vector<long> log_grid(long lo, long hi, long count);

}  // namespace bnpmix
