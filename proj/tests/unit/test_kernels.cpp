#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <vector>

#include "../oracles.hpp"
#include "bnpmix/errors.hpp"
#include "bnpmix/gfc.hpp"
#include "bnpmix/incgamma.hpp"
#include "bnpmix/special.hpp"
#include "bnpmix/vnk.hpp"

using namespace bnpmix;
using oracle::rel_diff;

TEST_CASE("log-space helpers") {
  CHECK(log_pochhammer(2.0, 3) == doctest::Approx(std::log(24.0)));
  CHECK(log_pochhammer(0.5, 0) == 0.0);
  CHECK_THROWS_AS(log_pochhammer(0.0, 2), DomainError);
  CHECK(log_binomial(10, 3) == doctest::Approx(std::log(120.0)));
  CHECK(std::isinf(log_binomial(5, 6)));
  const std::vector<double> v = {-1000.0, -1000.0};
  CHECK(log_sum_exp(v) == doctest::Approx(-1000.0 + std::log(2.0)));

  const std::vector<double> a = {std::log(1.0), std::log(2.0)}, b = {std::log(3.0), std::log(4.0), std::log(5.0)};
  const auto c = log_convolve(a, b);
  REQUIRE(c.size() == 4);
  const double want[] = {3, 4 + 6, 5 + 8, 10};
  for (int i = 0; i < 4; ++i) CHECK(std::exp(c[static_cast<std::size_t>(i)]) == doctest::Approx(want[i]));
}

TEST_CASE("upper incomplete gamma against quadrature") {
  boost::math::quadrature::exp_sinh<long double> integrator;
  for (double a : {-7.0, -2.5, -1.0, -0.25, 0.0, 0.5, 1.0, 3.0, 12.5, 40.0}) {
    for (double x : {0.01, 0.3, 1.0, 4.0, 20.0, 48.4}) {
      const long double ref = integrator.integrate(
          [&](long double s) {
            const long double e = std::exp(-s);
            if (std::isinf(s) || e == 0) return 0.0L;
            return std::pow(s, static_cast<long double>(a) - 1) * e;
          },
          static_cast<long double>(x), std::numeric_limits<long double>::infinity());
      const double got = upper_incomplete_gamma(BigFloat(a, 256), BigFloat(x, 256)).to_double();
      INFO("a = " << a << ", x = " << x);
      CHECK(rel_diff(got, static_cast<double>(ref)) < 1e-9);
    }
  }
}

TEST_CASE("upper incomplete gamma against Boost for positive shapes") {
  for (double a : {0.3, 1.7, 6.0, 33.0})
    for (double x : {0.2, 2.0, 30.0})
      CHECK(rel_diff(upper_incomplete_gamma(BigFloat(a, 200), BigFloat(x, 200)).to_double(),
                     boost::math::tgamma(a, x)) < 1e-13);
}

TEST_CASE("incomplete gamma ladder matches direct evaluation") {
  const long bits = 300 + ladder_guard_bits(48.4);
  const BigFloat x(48.4, bits);
  const auto ladder = incomplete_gamma_ladder(BigFloat(20.0, bits), 60, x);
  for (long j : {0L, 5L, 19L, 20L, 21L, 40L, 59L}) {
    const double direct = upper_incomplete_gamma(BigFloat(20.0 - static_cast<double>(j), bits), x).to_double();
    CHECK(rel_diff(ladder[static_cast<std::size_t>(j)].to_double(), direct) < 1e-14);
  }
}

TEST_CASE("generalized factorial coefficients: recurrence vs explicit sum") {
  for (double sigma : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    const GfcTable t(sigma, 25);
    for (long n = 1; n <= 25; ++n)
      for (long k = 1; k <= n; ++k) {
        const double ref = std::log(gfc_explicit(n, k, BigFloat(sigma, 1024)).to_double());
        INFO("sigma = " << sigma << " n = " << n << " k = " << k);
        CHECK(rel_diff(std::exp(t.log_c(n, k) - ref), 1.0) < 1e-10);
      }
  }
}

TEST_CASE("Stirling numbers and the small-sigma limit") {
  const auto s = log_stirling1_table(10);
  CHECK(std::exp(s[stirling_index(5, 2)]) == doctest::Approx(50.0));
  CHECK(std::exp(s[stirling_index(10, 3)]) == doctest::Approx(1172700.0));
  const double sigma = 1e-7;
  const GfcTable t(sigma, 10);
  for (long k = 1; k <= 10; ++k)
    CHECK(std::exp(t.log_c(10, k) - k * std::log(sigma) - s[stirling_index(10, k)]) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("GFC rows sum to the falling-power identity") {
  // sum_k C(n, k; sigma) (x)_k-style identities are awkward; use
  // sum_k C(n, k; sigma) / sigma^k * sigma^k = (n-th moment of a sum): for x = 1
  // the generating identity (sigma t)_n = sum_k C(n,k;sigma) (t)_k holds.
  for (double sigma : {0.3, 0.6}) {
    const GfcTable tab(sigma, 15);
    for (double t : {0.7, 2.0}) {
      for (long n : {3L, 9L, 15L}) {
        double rhs = 0.0;
        for (long k = 1; k <= n; ++k) rhs += std::exp(tab.log_c(n, k) + log_pochhammer(t, k));
        CHECK(rel_diff(std::exp(log_pochhammer(sigma * t, n)), rhs) < 1e-11);
      }
    }
  }
}

TEST_CASE("Gibbs weights: closed forms and recurrence") {
  SUBCASE("DP and PY satisfy the recurrence") {
    for (auto spec : {ProcessSpec::dp(19.2), ProcessSpec::py(0.25, 12.2), ProcessSpec::py(0.5, -0.3)}) {
      const GibbsWeights w(spec, 60);
      CHECK(static_cast<double>(w.log_vnk(1, 1).log()) == doctest::Approx(0.0).epsilon(1e-14));
      for (long n = 1; n < 60; ++n)
        for (long k = 1; k <= n; ++k) {
          const long double l = w.log_vnk(n, k).log();
          const long double ratio = (n - spec.sigma * k) * std::exp(w.log_vnk(n + 1, k).log() - l) +
                                    std::exp(w.log_vnk(n + 1, k + 1).log() - l);
          CHECK(std::abs(static_cast<double>(ratio) - 1.0) < 1e-11);
        }
    }
  }
  SUBCASE("PY ratio is constant in n") {
    const GibbsWeights w(ProcessSpec::py(0.25, 12.2), 400);
    for (long k : {1L, 10L, 100L}) {
      const long double first = w.log_ratio(k + 1, k);
      for (long n = k + 1; n <= 400; n += 7) CHECK(w.log_ratio(n, k) == first);
      CHECK(static_cast<double>(first) == doctest::Approx(-std::log(12.2 + k * 0.25)));
    }
  }
}

TEST_CASE("NGG weights: recurrence residual at 512 bits") {
  const NggWeights w(0.25, 48.4, 201, 512);
  std::vector<long> ns;
  for (long n = 1; n <= 40; ++n) ns.push_back(n);
  for (long n : {75L, 120L, 200L}) ns.push_back(n);
  for (long n : ns) {
    const auto row = w.row(n);
    const auto next = w.row(n + 1);
    for (long k = 1; k <= n; ++k) {
      BigFloat rhs = BigFloat(static_cast<double>(n) - 0.25 * static_cast<double>(k), w.working_bits());
      rhs *= next[static_cast<std::size_t>(k - 1)];
      rhs += next[static_cast<std::size_t>(k)];
      BigFloat diff = rhs - row[static_cast<std::size_t>(k - 1)];
      BigFloat rel = abs(diff) / abs(row[static_cast<std::size_t>(k - 1)]);
      INFO("n = " << n << " k = " << k);
      CHECK(rel.to_double() <= 1e-20);
    }
  }
  CHECK(w.vnk(1, 1).to_double() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("NGG weights with a non-integer 1/sigma") {
  const NggWeights w(0.3, 2.0, 30, 256);
  auto below = w.row(1);
  for (long n = 1; n < 30; ++n) {
    const auto above = w.row(n + 1);
    for (long k = 1; k <= n; ++k) {
      BigFloat rhs = BigFloat(static_cast<double>(n) - 0.3 * static_cast<double>(k), w.working_bits());
      rhs *= above[static_cast<std::size_t>(k - 1)];
      rhs += above[static_cast<std::size_t>(k)];
      CHECK(rel_diff(rhs.to_double(), below[static_cast<std::size_t>(k - 1)].to_double()) < 1e-14);
    }
    below = above;
  }
  for (long k : {1L, 4L, 17L}) CHECK(rel_diff(w.vnk(17, k).to_double(), w.row(17)[static_cast<std::size_t>(k - 1)].to_double()) < 1e-14);
}

TEST_CASE("NGG weights at small beta approach the stable process") {
  // beta -> 0 gives PY(sigma, 0).
  const GibbsWeights ngg(ProcessSpec::ngg(0.5, 1e-8), 20), py(ProcessSpec::py(0.5, 0.0), 20);
  for (long n : {2L, 7L, 20L})
    for (long k = 1; k <= n; ++k)
      CHECK(std::exp(static_cast<double>(ngg.log_vnk(n, k).log() - py.log_vnk(n, k).log())) ==
            doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(ProcessSpec::py(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(ProcessSpec::py(0.5, -0.6), DomainError);
  CHECK_THROWS_AS(ProcessSpec::dmp(1.0, 0), DomainError);
  CHECK_THROWS_AS(ProcessSpec::pym(0.0, 1.0, 5), DomainError);
  CHECK_THROWS_AS(GfcTable(1.0, 5), DomainError);
}
