#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bnpmix/ot.hpp"
#include "bnpmix/rng.hpp"

namespace bnpmix {

/// Finite Gaussian mixture used to simulate data.
struct GenSpec {
  std::vector<double> weights;
  std::vector<Eigen::VectorXd> means;
  Eigen::MatrixXd covariance;
  std::uint64_t seed = 1;

  /// Three bivariate components: weights (.5, .3, .2), means (.8,.8), (.8,-.8),
  /// (-.8,.8), common covariance 0.05 I.
  static GenSpec three_component(std::uint64_t seed = 1);
  long dim() const { return static_cast<long>(covariance.rows()); }
  void validate() const;
};

/// n observations in d dimensions, row-major, with the generating component.
struct Dataset {
  long d = 0;
  std::vector<double> x;
  std::vector<int> label;  // 0-based true component, -1 if unknown

  long n() const { return d == 0 ? 0 : static_cast<long>(x.size()) / d; }
  const double* row(long i) const { return x.data() + i * d; }
  Dataset prefix(long m) const;
};

/// Draws sequentially from one stream seeded by gen.seed, so the first m
/// points do not depend on n: smaller datasets are prefixes of larger ones.
Dataset generate_data(const GenSpec& gen, long n);

/// Prior hyperparameters for the overfitted Gaussian mixture:
///   mu_k ~ N(b0, B0),  Lambda_k = Sigma_k^{-1} ~ W(c0, C0),  C0 ~ W(g0, G0).
/// W(c, C) has density proportional to |X|^{c - (d+1)/2} exp(-tr(C X)), so
/// E[X] = c C^{-1}; it is the usual Wishart with 2c degrees of freedom and
/// scale (2C)^{-1}.
struct Hyper {
  Eigen::VectorXd b0;
  Eigen::MatrixXd B0;
  double c0 = 0.0;
  double g0 = 0.0;
  Eigen::MatrixXd G0;

  /// b0 = coordinate-wise median, B0 = diag(R_j^2), c0 = 2.5 + (d-1)/2,
  /// g0 = 0.5 + (d-1)/2, G0 = (100 g0 / c0) diag(1 / R_j^2), R_j the data range.
  static Hyper from_data(const Dataset& data);
};

enum class AlphaMode { Fixed, SolveEkn, GammaPrior };
enum class InitMode { KMeans, Random, Single };

struct ModelConfig {
  long K = 10;
  AlphaMode alpha_mode = AlphaMode::Fixed;
  double alpha_bar = 1.0;   // Fixed, and the starting value for GammaPrior
  double ekn_target = 5.0;  // SolveEkn
  double gamma_a = 1.0;     // GammaPrior: alpha_bar ~ Gamma(a, rate b K)
  double gamma_b = 0.1;
  bool prior_only = false;  // drop the likelihood from the allocation step
  InitMode init = InitMode::KMeans;

  void validate() const;
};

struct ChainState {
  std::vector<int> z;
  std::vector<long> counts;
  std::vector<double> log_w;  // log weights; weights may underflow in double
  std::vector<Eigen::VectorXd> mu;
  std::vector<Eigen::MatrixXd> precision;
  Eigen::MatrixXd C0;
  double alpha_bar = 1.0;
  double loglik = 0.0;

  long k_occupied() const;
  std::vector<double> weights() const;
};

struct TraceRecord {
  long iter = 0;
  long k_occupied = 0;
  std::vector<double> w_sorted;  // decreasing
  double alpha_bar = 0.0;
  double loglik = 0.0;
};

struct Snapshot {
  long iter = 0;
  std::vector<double> weights;  // all K components
  std::vector<std::vector<double>> locations;
};

struct Trace {
  std::uint64_t seed = 0;
  long chain = 0;
  long iters = 0, burnin = 0, thin = 1, snapshot_stride = 0;
  std::vector<TraceRecord> records;
  std::vector<Snapshot> snapshots;
  double alpha_acceptance = 0.0;  // GammaPrior only
  std::string error;              // set when the chain aborted
};

/// Random-walk scale for the log alpha_bar update, adapted during burn-in.
struct AlphaProposal {
  double log_scale = std::log(0.5);
  long accepted = 0, proposed = 0;
  long batch_accepted = 0, batch_proposed = 0;
  bool adapt = true;
};

ChainState init_state(const Dataset& data, const ModelConfig& cfg, const Hyper& hyper, double alpha_bar, Rng& rng);

/// One cycle: alpha_bar | z (GammaPrior; w integrated out), w | z,
/// mu | z, Lambda, Lambda | z, mu, C0 | Lambda, then z | w, mu, Lambda
/// (which also refreshes the observed-data log-likelihood).
void gibbs_sweep(ChainState& state, const Dataset& data, const ModelConfig& cfg, const Hyper& hyper, Rng& rng,
                 AlphaProposal* proposal = nullptr);

struct RunOptions {
  long n_chains = 2;
  long iters = 15000;
  long burnin = 6000;
  long thin = 1;
  long snapshot_stride = 10;  // 0 disables mixing-measure snapshots
  std::uint64_t seed = 1;
  bool parallel = true;
  std::vector<InitMode> inits;  // per chain; empty uses cfg.init for all
};

/// Independent chains with seeds derived from (seed, chain index). Serial and
/// parallel execution give identical traces.
std::vector<Trace> run_chains(const Dataset& data, const ModelConfig& cfg, const RunOptions& opts);

enum class TraceScalar { LogLik, KOccupied, AlphaBar };

/// Potential scale reduction factor sqrt((W + B/n) / W) with within-chain
/// variances W taken with divisor n; exactly 1 for identical chains.
double gelman_rubin(const std::vector<std::vector<double>>& chains);
double gelman_rubin(const std::vector<Trace>& traces, TraceScalar scalar);
std::vector<double> trace_scalar(const Trace& t, TraceScalar scalar);

/// pmf[k] = posterior probability of k occupied components, k = 0..K.
std::vector<double> posterior_kn_pmf(const std::vector<Trace>& traces);
double posterior_mean_kn(const std::vector<Trace>& traces);

struct RankSummary {
  long rank = 0;  // 1 = largest weight
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
};
std::vector<RankSummary> posterior_sorted_weights(const std::vector<Trace>& traces);

/// Snapshots as atomic measures over all components; weights that underflow
/// to exactly zero are dropped.
std::vector<AtomicMeasure> export_mixing_measures(const Trace& trace);
std::vector<AtomicMeasure> export_mixing_measures(const std::vector<Trace>& traces);

/// alpha_bar = alpha / K for which the DMP prior has E[K_n] = target.
double alpha_for_fixed_ekn(long n, double target, long K);

/// Linear-interpolated quantile of a sample (p in [0, 1]).
double quantile(std::vector<double> v, double p);

}  // namespace bnpmix
