#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "bnpmix/eppf.hpp"
#include "bnpmix/errors.hpp"
#include "bnpmix/prior_clusters.hpp"

using namespace bnpmix;
using oracle::rel_diff;

namespace {

// P(K_n = k) by summing the unordered EPPF over set partitions.
std::vector<double> kn_by_partitions(const ProcessSpec& spec, long n) {
  EppfEvaluator ev(spec, n);
  std::vector<double> pmf(static_cast<std::size_t>(n + 1), 0.0);
  oracle::for_each_set_partition(n, [&](const std::vector<long>& blocks) {
    pmf[blocks.size()] += static_cast<double>(ev.log_eppf_unordered(Composition(blocks)).value());
  });
  return pmf;
}

}  // namespace

TEST_CASE("Gibbs K_n pmf matches set-partition sums") {
  for (const auto& spec : {ProcessSpec::dp(1.7), ProcessSpec::py(0.25, 12.2), ProcessSpec::ngg(0.25, 48.4),
                           ProcessSpec::ngg(0.6, 0.2)}) {
    const auto pmf = prior_kn_gibbs(spec, 8);
    const auto ref = kn_by_partitions(spec, 8);
    for (long k = 1; k <= 8; ++k) CHECK(pmf.probability(k) == doctest::Approx(ref[static_cast<std::size_t>(k)]).epsilon(1e-10));
    CHECK(pmf.total() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("DMP K_n pmf matches label enumeration") {
  for (auto [alpha, K, n] : {std::tuple{0.5, 3L, 7L}, std::tuple{4.0, 5L, 6L}, std::tuple{22.5, 4L, 8L}}) {
    const auto pmf = prior_kn_dmp(ProcessSpec::dmp(alpha, K), n);
    const auto ref = oracle::dmp_kn_bruteforce(alpha, K, n);
    for (long k = 1; k <= std::min(n, K); ++k)
      CHECK(rel_diff(pmf.probability(k), ref[static_cast<std::size_t>(k)]) < 1e-11);
    CHECK(pmf.mean() == doctest::Approx(prior_mean_kn(ProcessSpec::dmp(alpha, K), n)).epsilon(1e-11));
  }
}

TEST_CASE("DMP pmf is normalized for large n") {
  for (long n : {200L, 2000L, 20000L}) {
    const auto pmf = prior_kn_dmp(ProcessSpec::dmp(10.0, 10), n);
    CHECK(pmf.total() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("Monte Carlo K_n matches exhaustive PYM enumeration") {
  const auto spec = ProcessSpec::pym(0.5, 1.0, 10);
  const long n = 6, draws = 40000;
  const auto mc = prior_kn_mc(spec, n, draws, 11);
  const auto ref = kn_by_partitions(spec, n);
  for (long k = 1; k <= n; ++k) {
    const double p = ref[static_cast<std::size_t>(k)];
    const double se = std::sqrt(p * (1 - p) / draws);
    INFO("k = " << k << " exact " << p << " mc " << mc.probability(k));
    CHECK(std::abs(mc.probability(k) - p) <= 3 * se + 1e-12);
  }
}

TEST_CASE("Monte Carlo K_n agrees with the exact Gibbs and DMP pmfs") {
  for (const auto& spec : {ProcessSpec::py(0.25, 2.0), ProcessSpec::dmp(3.0, 5), ProcessSpec::nggm(0.25, 1.0, 6)}) {
    const long n = 7, draws = 30000;
    const auto mc = prior_kn_mc(spec, n, draws, 5);
    const auto ref = kn_by_partitions(spec, n);
    for (long k = 1; k <= n; ++k) {
      const double p = ref[static_cast<std::size_t>(k)];
      CHECK(std::abs(mc.probability(k) - p) <= 3 * std::sqrt(p * (1 - p) / draws) + 1e-12);
    }
  }
}

TEST_CASE("Monte Carlo is reproducible and thread-count independent") {
  const auto spec = ProcessSpec::pym(0.25, 1.0, 8);
  const auto a = prior_kn_mc(spec, 30, 500, 99, kDefaultPrecisionBits, 1);
  const auto b = prior_kn_mc(spec, 30, 500, 99, kDefaultPrecisionBits, 4);
  CHECK(a.pmf == b.pmf);
}

TEST_CASE("solve_param_for_ekn hits its target") {
  const auto s = solve_param_for_ekn(ProcessSpec::py(0.25, 1.0), "alpha", 50, 10.0);
  CHECK(prior_mean_kn(with_param(ProcessSpec::py(0.25, 1.0), "alpha", s), 50) == doctest::Approx(10.0).epsilon(1e-3));
  CHECK_THROWS_AS(solve_param_for_ekn(ProcessSpec::dmp(1.0, 5), "alpha", 50, 7.0), BracketError);
  CHECK_THROWS_AS(solve_param_for_ekn(ProcessSpec::dp(1.0), "gamma", 50, 7.0), DomainError);
}

TEST_CASE("mean K_n is increasing in the concentration") {
  double prev = 0.0;
  for (double alpha : {0.1, 1.0, 5.0, 20.0}) {
    const double m = prior_mean_kn(ProcessSpec::dp(alpha), 100);
    CHECK(m > prev);
    prev = m;
  }
}
