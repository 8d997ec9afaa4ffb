// Brute-force reference computations shared by the unit and acceptance tests.
// Everything here is deliberately naive and independent of the library's
// fast paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "bnpmix/bigfloat.hpp"
#include "bnpmix/gfc.hpp"
#include "bnpmix/ot.hpp"
#include "bnpmix/vnk.hpp"

namespace oracle {

inline double rel_diff(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

// Calls f(blocks) for every set partition of {0..n-1}, via restricted growth strings.
inline void for_each_set_partition(long n, const std::function<void(const std::vector<long>&)>& f) {
  std::vector<long> a(static_cast<std::size_t>(n), 0);
  std::function<void(long, long)> rec = [&](long i, long m) {
    if (i == n) {
      std::vector<long> sizes(static_cast<std::size_t>(m + 1), 0);
      for (long v : a) ++sizes[static_cast<std::size_t>(v)];
      f(sizes);
      return;
    }
    for (long v = 0; v <= m + 1; ++v) {
      a[static_cast<std::size_t>(i)] = v;
      rec(i + 1, std::max(m, v));
    }
  };
  if (n == 0) return;
  a[0] = 0;
  rec(1, 0);
}

// Every composition (ordered block sizes) of n into k positive parts.
inline std::vector<std::vector<long>> compositions(long n, long k) {
  std::vector<std::vector<long>> out;
  std::vector<long> cur;
  std::function<void(long, long)> rec = [&](long left, long parts) {
    if (parts == 1) {
      cur.push_back(left);
      out.push_back(cur);
      cur.pop_back();
      return;
    }
    for (long v = 1; v <= left - parts + 1; ++v) {
      cur.push_back(v);
      rec(left - v, parts - 1);
      cur.pop_back();
    }
  };
  if (k >= 1 && n >= k) rec(n, k);
  return out;
}

// Generalized factorial coefficient from the explicit alternating sum, at high precision.
inline double gfc(long n, long l, double sigma) {
  return bnpmix::gfc_explicit(n, l, bnpmix::BigFloat(sigma, 1024)).to_double();
}

// Ordered-partition probability of the PYM by summing over every latent vector l.
inline double pym_eppf(const std::vector<long>& blocks, double sigma, double alpha, long K) {
  const long k = static_cast<long>(blocks.size());
  const long n = std::accumulate(blocks.begin(), blocks.end(), 0L);
  if (k > K) return 0.0;
  std::vector<long> l(blocks.size(), 1);
  double sum = 0.0;
  while (true) {
    long m = 0;
    double prod = 1.0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      m += l[i];
      prod *= gfc(blocks[i], l[i], sigma) / std::pow(static_cast<double>(K), static_cast<double>(l[i]));
    }
    sum += std::exp(std::lgamma(alpha / sigma + m) - std::lgamma(alpha / sigma + 1.0)) / sigma * prod;
    std::size_t i = 0;
    while (i < l.size() && l[i] == blocks[i]) l[i++] = 1;
    if (i == l.size()) break;
    ++l[i];
  }
  const double binom = std::exp(std::lgamma(K + 1.0) - std::lgamma(k + 1.0) - std::lgamma(K - k + 1.0));
  const double poch = std::exp(std::lgamma(alpha + n) - std::lgamma(alpha + 1.0));
  return binom / poch * sum;
}

// Same for the NGGM; `vnk(n, m)` supplies the NGG weights.
inline double nggm_eppf(const std::vector<long>& blocks, double sigma, long K,
                        const std::function<double(long, long)>& vnk) {
  const long k = static_cast<long>(blocks.size());
  const long n = std::accumulate(blocks.begin(), blocks.end(), 0L);
  if (k > K) return 0.0;
  std::vector<long> l(blocks.size(), 1);
  double sum = 0.0;
  while (true) {
    long m = 0;
    double prod = 1.0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      m += l[i];
      prod *= gfc(blocks[i], l[i], sigma) / std::pow(sigma, static_cast<double>(l[i]));
    }
    sum += vnk(n, m) / std::pow(static_cast<double>(K), static_cast<double>(m)) * prod;
    std::size_t i = 0;
    while (i < l.size() && l[i] == blocks[i]) l[i++] = 1;
    if (i == l.size()) break;
    ++l[i];
  }
  const double binom = std::exp(std::lgamma(K + 1.0) - std::lgamma(k + 1.0) - std::lgamma(K - k + 1.0));
  return binom * sum;
}

// P(K_n = k) for the DMP by enumerating all K^n label vectors under the
// Dirichlet-multinomial marginal. pmf index is k (0 unused).
inline std::vector<double> dmp_kn_bruteforce(double alpha, long K, long n) {
  const double c = alpha / static_cast<double>(K);
  std::vector<double> pmf(static_cast<std::size_t>(std::min(n, K) + 1), 0.0);
  std::vector<long> z(static_cast<std::size_t>(n), 0);
  const double log_norm = std::lgamma(alpha) - std::lgamma(alpha + n);
  while (true) {
    std::vector<long> counts(static_cast<std::size_t>(K), 0);
    for (long v : z) ++counts[static_cast<std::size_t>(v)];
    double lp = log_norm;
    long occ = 0;
    for (long cnt : counts) {
      if (cnt > 0) ++occ;
      lp += std::lgamma(c + cnt) - std::lgamma(c);
    }
    pmf[static_cast<std::size_t>(occ)] += std::exp(lp);
    std::size_t i = 0;
    while (i < z.size() && z[i] == K - 1) z[i++] = 0;
    if (i == z.size()) break;
    ++z[i];
  }
  return pmf;
}

// Optimal transport cost by enumerating every basic feasible solution
// (spanning-tree bases with m + n - 1 cells) of the transportation polytope.
inline double transport_bruteforce(const std::vector<double>& a, const std::vector<double>& b,
                                   const std::vector<double>& cost) {
  const std::size_t m = a.size(), n = b.size(), cells = m * n, basis = m + n - 1;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(cells, 0);
  std::fill(pick.end() - static_cast<long>(basis), pick.end(), 1);
  do {
    std::vector<double> ra(a), rb(b), flow(cells, 0.0);
    std::vector<bool> open(cells, false);
    for (std::size_t c = 0; c < cells; ++c) open[c] = pick[c] != 0;
    std::size_t remaining = basis;
    std::vector<bool> row_done(m, false), col_done(n, false);
    bool progress = true;
    while (remaining > 0 && progress) {
      progress = false;
      for (std::size_t i = 0; i < m && !progress; ++i) {
        if (row_done[i]) continue;
        std::size_t cnt = 0, last = 0;
        for (std::size_t j = 0; j < n; ++j)
          if (open[i * n + j]) ++cnt, last = j;
        if (cnt == 1) {
          flow[i * n + last] = ra[i];
          rb[last] -= ra[i];
          ra[i] = 0;
          open[i * n + last] = false;
          row_done[i] = true;
          --remaining;
          progress = true;
        }
      }
      for (std::size_t j = 0; j < n && !progress; ++j) {
        if (col_done[j]) continue;
        std::size_t cnt = 0, last = 0;
        for (std::size_t i = 0; i < m; ++i)
          if (open[i * n + j]) ++cnt, last = i;
        if (cnt == 1) {
          flow[last * n + j] = rb[j];
          ra[last] -= rb[j];
          rb[j] = 0;
          open[last * n + j] = false;
          col_done[j] = true;
          --remaining;
          progress = true;
        }
      }
    }
    if (remaining > 0) continue;  // cells contain a cycle: not a basis
    bool feasible = true;
    for (double f : flow) feasible = feasible && f >= -1e-12;
    for (double r : ra) feasible = feasible && std::abs(r) < 1e-12;
    for (double r : rb) feasible = feasible && std::abs(r) < 1e-12;
    if (!feasible) continue;
    double total = 0.0;
    for (std::size_t c = 0; c < cells; ++c) total += flow[c] * cost[c];
    best = std::min(best, total);
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

}  // namespace oracle
