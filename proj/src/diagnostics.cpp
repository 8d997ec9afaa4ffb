#include "bnpmix/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <set>
#include <thread>

#include "bnpmix/errors.hpp"

namespace bnpmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Calls f on every partition of n into exactly k parts, parts non-increasing.
template <class F>
void for_each_partition(long n, long k, F&& f) {
  std::vector<long> parts(static_cast<std::size_t>(k));
  auto rec = [&](auto&& self, long remaining, long slot, long cap) -> void {
    const long left = k - slot;
    if (left == 1) {
      if (remaining <= cap) {
        parts[static_cast<std::size_t>(slot)] = remaining;
        f(parts);
      }
      return;
    }
    const long top = std::min(cap, remaining - (left - 1));
    for (long p = top; p * left >= remaining && p >= 1; --p) {
      parts[static_cast<std::size_t>(slot)] = p;
      self(self, remaining - p, slot + 1, p);
    }
  };
  rec(rec, n, 0, n);
}

double finish(long double log_ratio, long n) {
  if (std::isinf(log_ratio)) return log_ratio > 0 ? kInf : 0.0;
  return static_cast<double>(std::exp(log_ratio) / static_cast<long double>(n));
}

void check_args(long n, long k) {
  if (k < 1 || n <= k) throw DomainError("c_n(k) requires 1 <= k < n");
}

}  // namespace

double CnkCurve::relative_change(long lo, long hi) const {
  double mx = -kInf, mn = kInf;
  for (const auto& p : points) {
    if (p.n < lo || p.n > hi) continue;
    mx = std::max(mx, p.value);
    mn = std::min(mn, p.value);
  }
  if (!(mx > -kInf)) throw DomainError("relative_change: no points in range");
  if (mx == 0.0) return 0.0;
  return (mx - mn) / mx;
}

double cnk_exact(const EppfEvaluator& eval, long n, long k) {
  check_args(n, k);
  if (n > kCnkExactMaxN) throw DomainError("cnk_exact: n > 30 is too costly; use cnk_fast");
  if (eval.spec().is_finite() && k > eval.spec().K) return 0.0;
  long double best = -std::numeric_limits<long double>::infinity();
  for_each_partition(n, k, [&](const std::vector<long>& parts) {
    const Composition comp(parts);
    std::set<long> seen;
    for (std::size_t j = 0; j < parts.size(); ++j) {
      if (parts[j] < 2 || !seen.insert(parts[j]).second) continue;
      best = std::max(best, eval.log_ratio_split(comp, j));
    }
  });
  return finish(best, n);
}

double cnk_exact(const ProcessSpec& spec, long n, long k, long precision_bits) {
  return cnk_exact(EppfEvaluator(spec, n, precision_bits), n, k);
}

double cnk_fast(const EppfEvaluator& eval, long n, long k) {
  check_args(n, k);
  if (eval.spec().is_finite() && k > eval.spec().K) return 0.0;
  std::vector<long> blocks(static_cast<std::size_t>(k), 1);
  blocks[0] = n - k + 1;
  return finish(eval.log_ratio_split(Composition(blocks), 0), n);
}

double cnk_fast(const ProcessSpec& spec, long n, long k, long precision_bits) {
  return cnk_fast(EppfEvaluator(spec, n, precision_bits), n, k);
}

CnkCurve cnk_curve(const ProcessSpec& spec, long k, const std::vector<long>& ns, long exact_max_n,
                   long precision_bits, unsigned threads) {
  CnkCurve curve{spec, k, std::vector<CnkPoint>(ns.size())};
  if (ns.empty()) return curve;
  const long n_max = *std::max_element(ns.begin(), ns.end());
  const EppfEvaluator eval(spec, n_max, precision_bits);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, ns.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < ns.size();) {
      try {
        const long n = ns[i];
        const bool exact = n <= std::min(exact_max_n, kCnkExactMaxN);
        curve.points[i] = {n, exact ? cnk_exact(eval, n, k) : cnk_fast(eval, n, k),
                           exact ? CnkMethod::ExactBruteforce : CnkMethod::HeuristicArgmax};
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return curve;
}

std::vector<double> vnk_ratio_curve(const ProcessSpec& spec, long k, const std::vector<long>& ns,
                                    long precision_bits) {
  if (ns.empty()) return {};
  const long n_max = *std::max_element(ns.begin(), ns.end());
  const GibbsWeights w(spec, n_max, precision_bits);
  std::vector<double> out;
  out.reserve(ns.size());
  for (long n : ns) out.push_back(static_cast<double>(std::exp(w.log_ratio(n, k))));
  return out;
}

std::vector<long> log_grid(long lo, long hi, long count) {
  if (lo < 1 || hi < lo) throw DomainError("log_grid: need 1 <= lo <= hi");
  std::vector<long> g{lo};
  if (count < 2 || hi == lo) {
    if (hi != lo) g.push_back(hi);
    return g;
  }
  const double a = std::log(static_cast<double>(lo)), b = std::log(static_cast<double>(hi));
  for (long i = 1; i < count; ++i) {
    const long v = std::lround(std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1)));
    if (v > g.back()) g.push_back(std::min(v, hi));
  }
  if (g.back() != hi) g.push_back(hi);
  return g;
}

}  // namespace bnpmix
