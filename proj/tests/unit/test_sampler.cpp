#include <doctest.h>

#include <cmath>
#include <numeric>

#include "../prior_only.hpp"
#include "bnpmix/errors.hpp"
#include "bnpmix/prior_clusters.hpp"
#include "bnpmix/sampler.hpp"

using namespace bnpmix;

TEST_CASE("simulated datasets nest") {
  const auto gen = GenSpec::three_component(17);
  const auto big = generate_data(gen, 500), small = generate_data(gen, 50);
  REQUIRE(small.n() == 50);
  CHECK(std::equal(small.x.begin(), small.x.end(), big.x.begin()));
  CHECK(big.prefix(50).x == small.x);
  std::vector<long> counts(3, 0);
  const auto many = generate_data(gen, 20000);
  for (int l : many.label) ++counts[static_cast<std::size_t>(l)];
  CHECK(counts[0] / 20000.0 == doctest::Approx(0.5).epsilon(0.05));
  CHECK(counts[2] / 20000.0 == doctest::Approx(0.2).epsilon(0.05));
}

TEST_CASE("hyperparameters from data") {
  const auto d = generate_data(GenSpec::three_component(1), 300);
  const auto h = Hyper::from_data(d);
  CHECK(h.c0 == doctest::Approx(3.0));
  CHECK(h.g0 == doctest::Approx(1.0));
  double lo = 1e9, hi = -1e9;
  for (long i = 0; i < d.n(); ++i) lo = std::min(lo, d.row(i)[0]), hi = std::max(hi, d.row(i)[0]);
  CHECK(h.B0(0, 0) == doctest::Approx((hi - lo) * (hi - lo)));
  CHECK(h.G0(0, 0) == doctest::Approx(100.0 * h.g0 / h.c0 / ((hi - lo) * (hi - lo))));
}

TEST_CASE("Gelman-Rubin factor") {
  CHECK(gelman_rubin({{1, 2, 3, 4}, {1, 2, 3, 4}}) == doctest::Approx(1.0));
  // Within variance 1.25 (divisor n), between = n * var(means) with divisor m-1.
  const double w = 1.25, b = 4.0 * 2.0;
  CHECK(gelman_rubin({{1, 2, 3, 4}, {3, 4, 5, 6}}) == doctest::Approx(std::sqrt((w + b / 4.0) / w)));
  CHECK(gelman_rubin({{2, 2, 2}, {2, 2, 2}}) == 1.0);
  CHECK(std::isinf(gelman_rubin({{2, 2, 2}, {3, 3, 3}})));
  CHECK_THROWS_AS(gelman_rubin({{1, 2, 3}}), DomainError);
}

TEST_CASE("chains are reproducible and independent of scheduling") {
  const auto d = generate_data(GenSpec::three_component(2), 80);
  ModelConfig m;
  RunOptions r;
  r.iters = 300;
  r.burnin = 100;
  r.snapshot_stride = 5;
  r.seed = 9;
  const auto par = run_chains(d, m, r);
  r.parallel = false;
  const auto ser = run_chains(d, m, r);
  REQUIRE(par.size() == 2);
  for (std::size_t c = 0; c < 2; ++c) {
    REQUIRE(par[c].records.size() == 200);
    for (std::size_t i = 0; i < 200; ++i) {
      CHECK(par[c].records[i].loglik == ser[c].records[i].loglik);
      CHECK(par[c].records[i].w_sorted == ser[c].records[i].w_sorted);
    }
  }
  CHECK(par[0].records.back().loglik != par[1].records.back().loglik);
}

TEST_CASE("posterior summaries are well formed") {
  const auto d = generate_data(GenSpec::three_component(3), 200);
  ModelConfig m;
  m.alpha_bar = 0.01;
  RunOptions r;
  r.iters = 1500;
  r.burnin = 500;
  r.seed = 4;
  const auto traces = run_chains(d, m, r);
  const auto pmf = posterior_kn_pmf(traces);
  CHECK(std::accumulate(pmf.begin(), pmf.end(), 0.0) == doctest::Approx(1.0));
  const double mean = posterior_mean_kn(traces);
  CHECK(mean > 2.5);
  CHECK(mean < 3.6);

  const auto ranks = posterior_sorted_weights(traces);
  REQUIRE(ranks.size() == 10);
  for (std::size_t i = 1; i < ranks.size(); ++i) CHECK(ranks[i].median <= ranks[i - 1].median);
  CHECK(ranks[0].median == doctest::Approx(0.5).epsilon(0.2));

  const auto measures = export_mixing_measures(traces);
  CHECK(measures.size() == 2 * 1000 / 10);
  for (const auto& g : measures) CHECK_NOTHROW(g.validate(1e-9));
  for (const auto& t : traces) CHECK(t.error.empty());
}

TEST_CASE("Gamma hyperprior on alpha_bar") {
  const auto d = generate_data(GenSpec::three_component(5), 100);
  ModelConfig m;
  m.alpha_mode = AlphaMode::GammaPrior;
  m.alpha_bar = 0.1;
  RunOptions r;
  r.iters = 2000;
  r.burnin = 1000;
  r.seed = 6;
  const auto traces = run_chains(d, m, r);
  for (const auto& t : traces) {
    CHECK(t.alpha_acceptance > 0.15);
    CHECK(t.alpha_acceptance < 0.85);
    for (const auto& rec : t.records) CHECK(rec.alpha_bar > 0.0);
  }
}

TEST_CASE("alpha_bar for a fixed prior E[K_n]") {
  for (long n : {20L, 200L, 2000L}) {
    const double a = alpha_for_fixed_ekn(n, 5.0, 10);
    CHECK(prior_mean_kn(ProcessSpec::dmp(a * 10, 10), n) == doctest::Approx(5.0).epsilon(1e-6));
  }
  CHECK(alpha_for_fixed_ekn(20000, 5.0, 10) < alpha_for_fixed_ekn(200, 5.0, 10));
  CHECK_THROWS_AS(alpha_for_fixed_ekn(50, 12.0, 10), BracketError);
}

TEST_CASE("prior-only sampler reproduces the DMP prior of K_n") {
  const auto res = prior_only::check(1.0, 10, 50, 4, 25000, 1000, 20, 123);
  for (const auto& row : res.rows) {
    INFO("k = " << row.k << " exact " << row.exact << " mcmc " << row.estimate << " se " << row.mcse);
    CHECK(row.z <= 3.0);
  }
}

TEST_CASE("model configuration is validated") {
  ModelConfig m;
  m.K = 0;
  CHECK_THROWS_AS(m.validate(), DomainError);
  m.K = 10;
  m.alpha_bar = -1.0;
  CHECK_THROWS_AS(m.validate(), DomainError);
  const auto d = generate_data(GenSpec::three_component(1), 10);
  RunOptions r;
  r.burnin = r.iters + 1;
  CHECK_THROWS_AS(run_chains(d, ModelConfig{}, r), DomainError);
}

TEST_CASE("quantiles") {
  CHECK(quantile({1, 2, 3, 4, 5}, 0.5) == 3.0);
  CHECK(quantile({1, 2, 3, 4}, 0.25) == doctest::Approx(1.75));
}
