// Prior-only run of the mixture sampler compared against the exact DMP pmf of
// K_n, with batch-means Monte Carlo standard errors.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "bnpmix/prior_clusters.hpp"
#include "bnpmix/sampler.hpp"

namespace prior_only {

struct Row {
  long k;
  double exact, estimate, mcse, z;
};

struct Result {
  std::vector<Row> rows;
  double max_z = 0.0;
  long draws = 0;
};

inline Result check(double alpha_bar, long K, long n, long chains, long iters, long burnin, long batches_per_chain,
                    std::uint64_t seed) {
  using namespace bnpmix;
  const Dataset data = generate_data(GenSpec::three_component(seed), n);
  ModelConfig m;
  m.K = K;
  m.alpha_bar = alpha_bar;
  m.prior_only = true;
  m.init = InitMode::Random;
  RunOptions r;
  r.n_chains = chains;
  r.iters = iters;
  r.burnin = burnin;
  r.snapshot_stride = 0;
  r.seed = seed;
  const auto traces = run_chains(data, m, r);
  const auto exact = prior_kn_dmp(ProcessSpec::dmp(alpha_bar * static_cast<double>(K), K), n);

  Result res;
  for (long k = 1; k <= std::min(n, K); ++k) {
    std::vector<double> batch_means;
    long total = 0, hits = 0;
    for (const auto& t : traces) {
      const long len = static_cast<long>(t.records.size()), per = len / batches_per_chain;
      for (long b = 0; b < batches_per_chain; ++b) {
        long h = 0;
        for (long i = b * per; i < (b + 1) * per; ++i) h += t.records[static_cast<std::size_t>(i)].k_occupied == k;
        batch_means.push_back(static_cast<double>(h) / static_cast<double>(per));
        hits += h;
        total += per;
      }
    }
    const double est = static_cast<double>(hits) / static_cast<double>(total);
    double var = 0.0;
    for (double b : batch_means) var += (b - est) * (b - est);
    var /= static_cast<double>(batch_means.size() - 1);
    const double p = exact.probability(k);
    // Standard error under the null: the autocorrelation inflation tau comes
    // from the batch means, the binomial variance from the exact p. Plugging
    // in the estimate instead shrinks the error whenever a rare state happens
    // to be undersampled. tau >= 1 also covers states never visited or left.
    const double nb = static_cast<double>(batch_means.size()), N = static_cast<double>(total);
    const double tau = est > 0.0 && est < 1.0 ? std::max(1.0, var / nb * N / (est * (1.0 - est))) : 1.0;
    const double se = std::sqrt(tau * p * (1.0 - p) / N);
    const double z = se > 0 ? std::abs(est - p) / se : (est == p ? 0.0 : INFINITY);
    res.rows.push_back({k, p, est, se, z});
    res.max_z = std::max(res.max_z, z);
    res.draws = total;
  }
  return res;
}

}  // namespace prior_only
