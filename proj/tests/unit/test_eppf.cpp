#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "bnpmix/eppf.hpp"
#include "bnpmix/errors.hpp"

using namespace bnpmix;
using oracle::rel_diff;

namespace {

std::vector<ProcessSpec> all_families() {
  return {ProcessSpec::dp(1.7),          ProcessSpec::py(0.25, 12.2),      ProcessSpec::py(0.6, -0.4),
          ProcessSpec::ngg(0.25, 48.4),  ProcessSpec::ngg(0.5, 0.3),       ProcessSpec::dmp(22.5, 200),
          ProcessSpec::dmp(0.3, 3),      ProcessSpec::pym(0.25, 12.2, 6),  ProcessSpec::pym(0.5, 1.0, 3),
          ProcessSpec::nggm(0.25, 2.0, 5), ProcessSpec::nggm(0.5, 0.7, 2)};
}

}  // namespace

TEST_CASE("unordered EPPF sums to one over set partitions") {
  for (const auto& spec : all_families()) {
    EppfEvaluator ev(spec, 8);
    for (long n = 1; n <= 8; ++n) {
      long double total = 0.0L;
      oracle::for_each_set_partition(n, [&](const std::vector<long>& blocks) {
        total += ev.log_eppf_unordered(Composition(blocks)).value();
      });
      INFO(spec.describe() << " n = " << n);
      CHECK(std::abs(static_cast<double>(total) - 1.0) < 1e-8);
    }
  }
}

TEST_CASE("EPPF is symmetric in the block order") {
  for (const auto& spec : all_families()) {
    EppfEvaluator ev(spec, 12);
    const auto a = ev.log_eppf(Composition({5, 1, 3, 2}));
    const auto b = ev.log_eppf(Composition({1, 2, 3, 5}));
    CHECK(a.log() == b.log());
  }
}

TEST_CASE("PYM convolution matches latent-vector enumeration") {
  for (auto [sigma, alpha, K] : {std::tuple{0.25, 12.2, 6L}, std::tuple{0.5, 1.0, 10L}, std::tuple{0.7, -0.2, 4L}}) {
    const auto spec = ProcessSpec::pym(sigma, alpha, K);
    EppfEvaluator ev(spec, 10);
    for (long n = 1; n <= 10; ++n)
      for (long k = 1; k <= std::min(n, 4L); ++k)
        for (const auto& blocks : oracle::compositions(n, k)) {
          const double ref = oracle::pym_eppf(blocks, sigma, alpha, K);
          const double got = static_cast<double>(ev.log_eppf(Composition(blocks)).value());
          INFO(spec.describe() << " n = " << n << " k = " << k);
          CHECK(rel_diff(got, ref) < 1e-10);
        }
  }
}

TEST_CASE("NGGM convolution matches latent-vector enumeration") {
  for (auto [sigma, beta, K] : {std::tuple{0.25, 2.0, 5L}, std::tuple{0.5, 0.7, 8L}}) {
    const auto spec = ProcessSpec::nggm(sigma, beta, K);
    const NggWeights w(sigma, beta, 10, 256);
    auto vnk = [&](long n, long m) { return w.vnk(n, m).to_double(); };
    EppfEvaluator ev(spec, 10);
    for (long n = 1; n <= 10; ++n)
      for (long k = 1; k <= std::min(n, 4L); ++k)
        for (const auto& blocks : oracle::compositions(n, k)) {
          const double ref = oracle::nggm_eppf(blocks, sigma, K, vnk);
          const double got = static_cast<double>(ev.log_eppf(Composition(blocks)).value());
          CHECK(rel_diff(got, ref) < 1e-10);
        }
  }
}

TEST_CASE("finite families give zero probability beyond K blocks") {
  for (const auto& spec : {ProcessSpec::dmp(1.0, 2), ProcessSpec::pym(0.5, 1.0, 2), ProcessSpec::nggm(0.5, 1.0, 2)}) {
    EppfEvaluator ev(spec, 5);
    CHECK(ev.log_eppf(Composition({1, 1, 1})).is_zero());
    CHECK(std::isinf(ev.log_ratio_split(Composition({2, 1}), 0)));
  }
}

TEST_CASE("split ratio shortcut agrees with two full evaluations") {
  for (const auto& spec : all_families()) {
    EppfEvaluator ev(spec, 14);
    const Composition a({6, 3, 1});
    for (std::size_t j : {0UL, 1UL}) {
      const auto b = a.split_singleton(j);
      const LogValue pa = ev.log_eppf(a), pb = ev.log_eppf(b);
      if (pb.is_zero()) continue;
      CHECK(static_cast<double>(ev.log_ratio_split(a, j)) ==
            doctest::Approx(static_cast<double>(pa.log() - pb.log())).epsilon(1e-10));
    }
    CHECK_THROWS_AS(ev.log_ratio_split(a, 2), DomainError);
  }
}

TEST_CASE("PYM approaches PY as K grows") {
  const Composition comp({3, 2});
  const double py = static_cast<double>(log_eppf(ProcessSpec::py(0.25, 12.2), comp).value());
  const double k50 = static_cast<double>(log_eppf(ProcessSpec::pym(0.25, 12.2, 50), comp).value());
  const double k500 = static_cast<double>(log_eppf(ProcessSpec::pym(0.25, 12.2, 500), comp).value());
  CHECK(rel_diff(k500, py) < rel_diff(k50, py));
}

TEST_CASE("DMP EPPF closed form") {
  // binom(K, k) / (alpha)_n prod (alpha/K)_{n_j}
  const double alpha = 2.0;
  const long K = 4;
  const double c = alpha / K;
  const double want = 6.0 / (2.0 * 3 * 4 * 5) * (c * (c + 1) * (c + 2)) * c;
  CHECK(static_cast<double>(log_eppf(ProcessSpec::dmp(alpha, K), Composition({3, 1})).value()) ==
        doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("compositions validate their blocks") {
  CHECK_THROWS_AS(Composition(std::vector<long>{}), DomainError);
  CHECK_THROWS_AS(Composition({2, 0}), DomainError);
  const Composition c({3, 1});
  CHECK(c.split_singleton(0).blocks() == std::vector<long>{2, 1, 1});
  CHECK(c.add_element(2).blocks() == std::vector<long>{3, 1, 1});
}
