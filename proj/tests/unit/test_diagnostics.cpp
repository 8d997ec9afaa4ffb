#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "bnpmix/diagnostics.hpp"
#include "bnpmix/eppf.hpp"
#include "bnpmix/errors.hpp"

using namespace bnpmix;
using oracle::rel_diff;

namespace {

// c_n(k) straight from the definition: every composition, every donor block.
double cnk_direct(const ProcessSpec& spec, long n, long k) {
  EppfEvaluator ev(spec, n);
  double best = 0.0;
  for (const auto& blocks : oracle::compositions(n, k)) {
    const Composition a(blocks);
    const double pa = static_cast<double>(ev.log_eppf(a).value());
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      if (blocks[j] < 2) continue;
      const double pb = static_cast<double>(ev.log_eppf(a.split_singleton(j)).value());
      if (pb == 0.0) {
        if (pa > 0.0) return std::numeric_limits<double>::infinity();
        continue;
      }
      best = std::max(best, pa / pb);
    }
  }
  return best / static_cast<double>(n);
}

}  // namespace

TEST_CASE("cnk_exact matches the definition on small n") {
  for (const auto& spec : {ProcessSpec::dp(1.0), ProcessSpec::py(0.25, 2.0), ProcessSpec::ngg(0.5, 1.0),
                           ProcessSpec::dmp(2.0, 5), ProcessSpec::pym(0.5, 1.0, 10), ProcessSpec::nggm(0.25, 1.0, 6)}) {
    for (long k = 1; k <= 3; ++k)
      for (long n : {k + 1, 6L, 8L}) {
        INFO(spec.describe() << " n = " << n << " k = " << k);
        CHECK(rel_diff(cnk_exact(spec, n, k), cnk_direct(spec, n, k)) < 1e-10);
      }
  }
}

TEST_CASE("cnk_fast equals cnk_exact for the exact-argmax families") {
  for (const auto& spec : {ProcessSpec::dp(19.2), ProcessSpec::py(0.25, 12.2), ProcessSpec::ngg(0.25, 48.4),
                           ProcessSpec::dmp(22.5, 200)}) {
    EppfEvaluator ev(spec, 30);
    for (long k = 1; k <= 4; ++k)
      for (long n = k + 1; n <= 30; n += 3) CHECK(rel_diff(cnk_fast(ev, n, k), cnk_exact(ev, n, k)) < 1e-8);
  }
}

TEST_CASE("c_n(k) closed forms for DP and PY") {
  // Large-block donor: c_n(k) = (k+1)(n-k-sigma)/(n (alpha + k sigma)).
  for (auto [sigma, alpha] : {std::pair{0.0, 19.2}, std::pair{0.25, 12.2}}) {
    const auto spec = sigma == 0.0 ? ProcessSpec::dp(alpha) : ProcessSpec::py(sigma, alpha);
    for (long k : {1L, 10L})
      for (long n : {50L, 400L}) {
        const double want = (k + 1) * (n - k - sigma) / (n * (alpha + k * sigma));
        CHECK(cnk_fast(spec, n, k) == doctest::Approx(want).epsilon(1e-12));
      }
  }
}

TEST_CASE("c_n(k) stays below the DMP bound") {
  const double alpha = 22.5;
  const long K = 200;
  for (long k : {1L, 10L, 100L})
    for (long n : {200L, 1000L}) CHECK(cnk_fast(ProcessSpec::dmp(alpha, K), n, k) <= K * (k + 1) / (alpha * (K - k)) + 1e-12);
}

TEST_CASE("finite families: k = K gives an infinite split ratio") {
  CHECK(std::isinf(cnk_exact(ProcessSpec::dmp(1.0, 3), 6, 3)));
  CHECK(std::isinf(cnk_fast(ProcessSpec::pym(0.5, 1.0, 3), 6, 3)));
  CHECK(cnk_exact(ProcessSpec::dmp(1.0, 3), 6, 4) == 0.0);
}

TEST_CASE("relative change and grids") {
  CnkCurve c;
  c.points = {{100, 2.0}, {200, 1.9}, {300, 1.8}};
  CHECK(c.relative_change(150, 300) == doctest::Approx(0.1 / 1.9));
  const auto g = log_grid(2, 5000, 40);
  CHECK(g.front() == 2);
  CHECK(g.back() == 5000);
  CHECK(std::is_sorted(g.begin(), g.end()));
  CHECK(std::adjacent_find(g.begin(), g.end()) == g.end());
  CHECK_THROWS_AS(cnk_exact(ProcessSpec::dp(1.0), 40, 3), DomainError);
}

TEST_CASE("cnk_curve uses the exact oracle below its cutoff") {
  const auto curve = cnk_curve(ProcessSpec::py(0.25, 12.2), 2, {5, 20, 40, 80}, 30);
  REQUIRE(curve.points.size() == 4);
  CHECK(curve.points[0].method == CnkMethod::ExactBruteforce);
  CHECK(curve.points[1].method == CnkMethod::ExactBruteforce);
  CHECK(curve.points[2].method == CnkMethod::HeuristicArgmax);
}
