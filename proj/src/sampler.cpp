#include "bnpmix/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <thread>

#include "bnpmix/errors.hpp"
#include "bnpmix/prior_clusters.hpp"
#include "bnpmix/process.hpp"

namespace bnpmix {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Eigen::VectorXd normal_vector(Rng& rng, long d) {
  Eigen::VectorXd z(d);
  for (long i = 0; i < d; ++i) z(i) = standard_normal(rng);
  return z;
}

// Draw from W(c, C) in the |X|^{c-(d+1)/2} exp(-tr(C X)) parameterization
// via the Bartlett decomposition of Wishart(2c, (2C)^{-1}).
Eigen::MatrixXd sample_wishart(Rng& rng, double c, const Eigen::MatrixXd& C) {
  const long d = C.rows();
  const double df = 2.0 * c;
  if (!(df > static_cast<double>(d) - 1.0)) throw NumericError("Wishart: too few degrees of freedom");
  Eigen::LLT<Eigen::MatrixXd> llt((2.0 * C).inverse());
  if (llt.info() != Eigen::Success) throw NumericError("Wishart: scale matrix is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
  for (long i = 0; i < d; ++i) {
    A(i, i) = std::sqrt(2.0 * std::exp(log_gamma_variate(rng, 0.5 * (df - static_cast<double>(i)))));
    for (long j = 0; j < i; ++j) A(i, j) = standard_normal(rng);
  }
  const Eigen::MatrixXd LA = L * A;
  Eigen::MatrixXd X = LA * LA.transpose();
  return 0.5 * (X + X.transpose());
}

double median_of(std::vector<double> v) { return quantile(std::move(v), 0.5); }

std::vector<int> kmeans_labels(const Dataset& data, long K, Rng& rng) {
  const long n = data.n(), d = data.d;
  std::vector<int> z(static_cast<std::size_t>(n), 0);
  if (n == 0) return z;
  const long k_eff = std::min(K, n);
  // k-means++ seeding
  std::vector<std::vector<double>> centers;
  std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  auto dist2 = [&](long i, const std::vector<double>& c) {
    double s = 0.0;
    for (long t = 0; t < d; ++t) s += (data.row(i)[t] - c[static_cast<std::size_t>(t)]) * (data.row(i)[t] - c[static_cast<std::size_t>(t)]);
    return s;
  };
  long first = static_cast<long>(uniform_open(rng) * static_cast<double>(n));
  centers.emplace_back(data.row(first), data.row(first) + d);
  while (static_cast<long>(centers.size()) < k_eff) {
    double total = 0.0;
    for (long i = 0; i < n; ++i) {
      d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)], dist2(i, centers.back()));
      total += d2[static_cast<std::size_t>(i)];
    }
    long pick = n - 1;
    if (total > 0.0) {
      double u = uniform_open(rng) * total;
      for (long i = 0; i < n; ++i) {
        u -= d2[static_cast<std::size_t>(i)];
        if (u <= 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<long>(uniform_open(rng) * static_cast<double>(n));
    }
    centers.emplace_back(data.row(pick), data.row(pick) + d);
  }
  for (int it = 0; it < 50; ++it) {
    bool changed = false;
    for (long i = 0; i < n; ++i) {
      int best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (long k = 0; k < k_eff; ++k) {
        const double v = dist2(i, centers[static_cast<std::size_t>(k)]);
        if (v < bd) {
          bd = v;
          best = static_cast<int>(k);
        }
      }
      if (z[static_cast<std::size_t>(i)] != best) changed = true;
      z[static_cast<std::size_t>(i)] = best;
    }
    std::vector<std::vector<double>> sum(static_cast<std::size_t>(k_eff), std::vector<double>(static_cast<std::size_t>(d), 0.0));
    std::vector<long> cnt(static_cast<std::size_t>(k_eff), 0);
    for (long i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(z[static_cast<std::size_t>(i)]);
      ++cnt[k];
      for (long t = 0; t < d; ++t) sum[k][static_cast<std::size_t>(t)] += data.row(i)[t];
    }
    for (long k = 0; k < k_eff; ++k) {
      if (cnt[static_cast<std::size_t>(k)] == 0) continue;
      for (long t = 0; t < d; ++t)
        centers[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)] =
            sum[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)] / static_cast<double>(cnt[static_cast<std::size_t>(k)]);
    }
    if (!changed && it > 0) break;
  }
  return z;
}

double log_dirichlet_marginal(const std::vector<long>& counts, long n, double a) {
  const double K = static_cast<double>(counts.size());
  double s = std::lgamma(K * a) - std::lgamma(static_cast<double>(n) + K * a);
  for (long c : counts)
    if (c > 0) s += std::lgamma(static_cast<double>(c) + a) - std::lgamma(a);
  return s;
}

}  // namespace

GenSpec GenSpec::three_component(std::uint64_t seed) {
  GenSpec g;
  g.weights = {0.5, 0.3, 0.2};
  g.means = {Eigen::Vector2d(0.8, 0.8), Eigen::Vector2d(0.8, -0.8), Eigen::Vector2d(-0.8, 0.8)};
  g.covariance = 0.05 * Eigen::Matrix2d::Identity();
  g.seed = seed;
  return g;
}

void GenSpec::validate() const {
  if (weights.empty() || weights.size() != means.size()) throw DomainError("GenSpec: weights and means differ in length");
  double s = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw DomainError("GenSpec: weights must be positive");
    s += w;
  }
  if (std::abs(s - 1.0) > 1e-12) throw DomainError("GenSpec: weights must sum to 1");
  if (covariance.rows() != covariance.cols() || covariance.rows() == 0) throw DomainError("GenSpec: covariance must be square");
  for (const auto& m : means)
    if (m.size() != covariance.rows()) throw DomainError("GenSpec: mean dimension mismatch");
  if (Eigen::LLT<Eigen::MatrixXd>(covariance).info() != Eigen::Success)
    throw DomainError("GenSpec: covariance is not positive definite");
}

Dataset Dataset::prefix(long m) const {
  if (m < 0 || m > n()) throw DomainError("Dataset::prefix: size out of range");
  Dataset out;
  out.d = d;
  out.x.assign(x.begin(), x.begin() + m * d);
  out.label.assign(label.begin(), label.begin() + m);
  return out;
}

Dataset generate_data(const GenSpec& gen, long n) {
  gen.validate();
  if (n < 0) throw DomainError("generate_data: n must be >= 0");
  const long d = gen.dim();
  const Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(gen.covariance).matrixL();
  Rng rng(gen.seed);
  std::vector<double> log_w;
  for (double w : gen.weights) log_w.push_back(std::log(w));
  Dataset out;
  out.d = d;
  out.x.reserve(static_cast<std::size_t>(n * d));
  out.label.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    const auto k = sample_log_categorical(rng, log_w.data(), log_w.size());
    const Eigen::VectorXd y = gen.means[k] + L * normal_vector(rng, d);
    for (long t = 0; t < d; ++t) out.x.push_back(y(t));
    out.label.push_back(static_cast<int>(k));
  }
  return out;
}

Hyper Hyper::from_data(const Dataset& data) {
  const long n = data.n(), d = data.d;
  if (n < 2) throw DomainError("Hyper::from_data: need at least two observations");
  Hyper h;
  h.b0.resize(d);
  Eigen::VectorXd R2(d);
  for (long t = 0; t < d; ++t) {
    std::vector<double> col(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = data.row(i)[t];
    h.b0(t) = median_of(col);
    const auto [mn, mx] = std::minmax_element(col.begin(), col.end());
    const double R = *mx - *mn;
    if (!(R > 0.0)) throw DomainError("Hyper::from_data: data has zero range in some dimension");
    R2(t) = R * R;
  }
  const double r = static_cast<double>(d);
  h.c0 = 2.5 + (r - 1.0) / 2.0;
  h.g0 = 0.5 + (r - 1.0) / 2.0;
  h.B0 = R2.asDiagonal();
  h.G0 = (100.0 * h.g0 / h.c0) * Eigen::MatrixXd(R2.cwiseInverse().asDiagonal());
  return h;
}

void ModelConfig::validate() const {
  if (K < 1) throw DomainError("ModelConfig: K must be >= 1");
  if (alpha_mode != AlphaMode::SolveEkn && !(alpha_bar > 0.0)) throw DomainError("ModelConfig: alpha_bar must be positive");
  if (alpha_mode == AlphaMode::GammaPrior && !(gamma_a > 0.0 && gamma_b > 0.0))
    throw DomainError("ModelConfig: gamma hyperparameters must be positive");
  if (alpha_mode == AlphaMode::SolveEkn && !(ekn_target > 1.0 && ekn_target < static_cast<double>(K)))
    throw DomainError("ModelConfig: E[K_n] target must lie in (1, K)");
}

long ChainState::k_occupied() const {
  return static_cast<long>(std::count_if(counts.begin(), counts.end(), [](long c) { return c > 0; }));
}

std::vector<double> ChainState::weights() const {
  std::vector<double> w(log_w.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::exp(log_w[k]);
  return w;
}

ChainState init_state(const Dataset& data, const ModelConfig& cfg, const Hyper& hyper, double alpha_bar, Rng& rng) {
  const long n = data.n(), K = cfg.K, d = data.d;
  ChainState s;
  s.alpha_bar = alpha_bar;
  switch (cfg.init) {
    case InitMode::KMeans:
      s.z = kmeans_labels(data, K, rng);
      break;
    case InitMode::Random:
      s.z.resize(static_cast<std::size_t>(n));
      for (auto& z : s.z) z = static_cast<int>(std::min<double>(static_cast<double>(K - 1), uniform_open(rng) * static_cast<double>(K)));
      break;
    case InitMode::Single:
      s.z.assign(static_cast<std::size_t>(n), 0);
      break;
  }
  s.counts.assign(static_cast<std::size_t>(K), 0);
  for (int z : s.z) ++s.counts[static_cast<std::size_t>(z)];
  s.log_w.assign(static_cast<std::size_t>(K), -std::log(static_cast<double>(K)));
  s.C0 = hyper.g0 * hyper.G0.inverse();
  const Eigen::MatrixXd lambda0 = hyper.c0 * s.C0.inverse();
  s.mu.assign(static_cast<std::size_t>(K), hyper.b0);
  s.precision.assign(static_cast<std::size_t>(K), lambda0);
  (void)d;
  return s;
}

void gibbs_sweep(ChainState& s, const Dataset& data, const ModelConfig& cfg, const Hyper& hyper, Rng& rng,
                 AlphaProposal* proposal) {
  const long n = data.n(), K = cfg.K, d = data.d;
  const auto Ks = static_cast<std::size_t>(K);

  // alpha_bar | z with the weights integrated out; random walk on log alpha_bar.
  if (cfg.alpha_mode == AlphaMode::GammaPrior) {
    const double rate = cfg.gamma_b * static_cast<double>(K);
    auto log_target = [&](double a) {
      return log_dirichlet_marginal(s.counts, n, a) + cfg.gamma_a * std::log(a) - rate * a;  // includes the log-scale Jacobian
    };
    const double scale = proposal ? std::exp(proposal->log_scale) : 0.5;
    const double prop = s.alpha_bar * std::exp(scale * standard_normal(rng));
    const bool accept = std::log(uniform_open(rng)) < log_target(prop) - log_target(s.alpha_bar);
    if (accept) s.alpha_bar = prop;
    if (proposal) {
      ++proposal->proposed;
      ++proposal->batch_proposed;
      if (accept) {
        ++proposal->accepted;
        ++proposal->batch_accepted;
      }
      if (proposal->adapt && proposal->batch_proposed == 50) {
        const double rate_acc = static_cast<double>(proposal->batch_accepted) / 50.0;
        proposal->log_scale += rate_acc > 0.44 ? 0.1 : -0.1;
        proposal->batch_accepted = proposal->batch_proposed = 0;
      }
    }
  }

  // w | z ~ Dirichlet(alpha_bar + counts), in log space.
  {
    std::vector<double> lg(Ks);
    for (std::size_t k = 0; k < Ks; ++k) lg[k] = log_gamma_variate(rng, s.alpha_bar + static_cast<double>(s.counts[k]));
    const double m = *std::max_element(lg.begin(), lg.end());
    double tot = 0.0;
    for (double v : lg) tot += std::exp(v - m);
    const double lse = m + std::log(tot);
    for (std::size_t k = 0; k < Ks; ++k) s.log_w[k] = lg[k] - lse;
  }

  // Sufficient statistics.
  std::vector<Eigen::VectorXd> sum(Ks, Eigen::VectorXd::Zero(d));
  if (!cfg.prior_only) {
    for (long i = 0; i < n; ++i) sum[static_cast<std::size_t>(s.z[static_cast<std::size_t>(i)])] += Eigen::Map<const Eigen::VectorXd>(data.row(i), d);
  }
  const Eigen::MatrixXd B0inv = hyper.B0.inverse();
  const Eigen::VectorXd B0inv_b0 = B0inv * hyper.b0;
  std::vector<Eigen::MatrixXd> scatter(Ks, Eigen::MatrixXd::Zero(d, d));

  for (std::size_t k = 0; k < Ks; ++k) {
    const double nk = cfg.prior_only ? 0.0 : static_cast<double>(s.counts[k]);
    // mu_k | z, Lambda_k
    const Eigen::MatrixXd P = B0inv + nk * s.precision[k];
    Eigen::LLT<Eigen::MatrixXd> llt(P);
    if (llt.info() != Eigen::Success) throw NumericError("mean update: posterior precision is not positive definite");
    const Eigen::VectorXd mean = llt.solve(B0inv_b0 + s.precision[k] * sum[k]);
    s.mu[k] = mean + llt.matrixU().solve(normal_vector(rng, d));
  }
  if (!cfg.prior_only) {
    for (long i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(s.z[static_cast<std::size_t>(i)]);
      const Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(data.row(i), d) - s.mu[k];
      scatter[k].noalias() += r * r.transpose();
    }
  }
  Eigen::MatrixXd lambda_sum = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t k = 0; k < Ks; ++k) {
    const double nk = cfg.prior_only ? 0.0 : static_cast<double>(s.counts[k]);
    s.precision[k] = sample_wishart(rng, hyper.c0 + 0.5 * nk, s.C0 + 0.5 * scatter[k]);
    lambda_sum += s.precision[k];
  }
  s.C0 = sample_wishart(rng, hyper.g0 + static_cast<double>(K) * hyper.c0, hyper.G0 + lambda_sum);

  // z | w, mu, Lambda
  std::vector<double> logw_k(Ks);
  if (cfg.prior_only) {
    for (long i = 0; i < n; ++i) s.z[static_cast<std::size_t>(i)] = static_cast<int>(sample_log_categorical(rng, s.log_w.data(), Ks));
    s.loglik = 0.0;
  } else {
    // Upper factor U with Lambda = U^T U so that the quadratic form is |U (y - mu)|^2.
    std::vector<Eigen::MatrixXd> U(Ks);
    std::vector<double> base(Ks);
    const double log_2pi = std::log(2.0 * std::numbers::pi);
    for (std::size_t k = 0; k < Ks; ++k) {
      Eigen::LLT<Eigen::MatrixXd> llt(s.precision[k]);
      if (llt.info() != Eigen::Success) throw NumericError("allocation step: precision is not positive definite");
      U[k] = llt.matrixU();
      double half_logdet = 0.0;
      for (long t = 0; t < d; ++t) half_logdet += std::log(U[k](t, t));
      base[k] = s.log_w[k] + half_logdet - 0.5 * static_cast<double>(d) * log_2pi;
    }
    std::vector<double> diff(static_cast<std::size_t>(d));
    double loglik = 0.0;
    for (long i = 0; i < n; ++i) {
      const double* y = data.row(i);
      for (std::size_t k = 0; k < Ks; ++k) {
        if (!std::isfinite(base[k])) {
          logw_k[k] = kNegInf;
          continue;
        }
        for (long t = 0; t < d; ++t) diff[static_cast<std::size_t>(t)] = y[t] - s.mu[k](t);
        double q = 0.0;
        for (long a = 0; a < d; ++a) {
          double v = 0.0;
          for (long b = a; b < d; ++b) v += U[k](a, b) * diff[static_cast<std::size_t>(b)];
          q += v * v;
        }
        logw_k[k] = base[k] - 0.5 * q;
      }
      const double m = *std::max_element(logw_k.begin(), logw_k.end());
      double tot = 0.0;
      for (double v : logw_k) tot += std::exp(v - m);
      loglik += m + std::log(tot);
      double u = uniform_open(rng) * tot;
      std::size_t pick = Ks - 1;
      for (std::size_t k = 0; k < Ks; ++k) {
        u -= std::exp(logw_k[k] - m);
        if (u <= 0.0) {
          pick = k;
          break;
        }
      }
      s.z[static_cast<std::size_t>(i)] = static_cast<int>(pick);
    }
    s.loglik = loglik;
  }
  std::fill(s.counts.begin(), s.counts.end(), 0);
  for (int z : s.z) ++s.counts[static_cast<std::size_t>(z)];
}

namespace {

Trace run_one(const Dataset& data, const ModelConfig& cfg, const Hyper& hyper, const RunOptions& opts, long chain,
              double alpha0) {
  Trace tr;
  tr.seed = derive_seed(opts.seed, {static_cast<std::uint64_t>(chain)});
  tr.chain = chain;
  tr.iters = opts.iters;
  tr.burnin = opts.burnin;
  tr.thin = opts.thin;
  tr.snapshot_stride = opts.snapshot_stride;
  Rng rng(tr.seed);
  ModelConfig c = cfg;
  if (!opts.inits.empty()) c.init = opts.inits[static_cast<std::size_t>(chain) % opts.inits.size()];
  AlphaProposal prop;
  try {
    ChainState s = init_state(data, c, hyper, alpha0, rng);
    for (long t = 1; t <= opts.iters; ++t) {
      prop.adapt = t <= opts.burnin;
      gibbs_sweep(s, data, c, hyper, rng, &prop);
      if (t <= opts.burnin) continue;
      const long since = t - opts.burnin;
      if (since % opts.thin == 0) {
        TraceRecord r;
        r.iter = t;
        r.k_occupied = s.k_occupied();
        r.w_sorted = s.weights();
        std::sort(r.w_sorted.begin(), r.w_sorted.end(), std::greater<>());
        r.alpha_bar = s.alpha_bar;
        r.loglik = s.loglik;
        tr.records.push_back(std::move(r));
      }
      if (opts.snapshot_stride > 0 && since % opts.snapshot_stride == 0) {
        Snapshot snap;
        snap.iter = t;
        snap.weights = s.weights();
        for (const auto& m : s.mu) snap.locations.emplace_back(m.data(), m.data() + m.size());
        tr.snapshots.push_back(std::move(snap));
      }
    }
  } catch (const std::exception& e) {
    tr.error = e.what();
  }
  tr.alpha_acceptance = prop.proposed ? static_cast<double>(prop.accepted) / static_cast<double>(prop.proposed) : 0.0;
  return tr;
}

}  // namespace

std::vector<Trace> run_chains(const Dataset& data, const ModelConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  if (opts.n_chains < 1) throw DomainError("run_chains: need at least one chain");
  if (!(opts.iters > opts.burnin) || opts.burnin < 0) throw DomainError("run_chains: iters must exceed burnin");
  if (opts.thin < 1 || opts.snapshot_stride < 0) throw DomainError("run_chains: bad thinning");
  if (data.n() < 2) throw DomainError("run_chains: need at least two observations");
  const Hyper hyper = Hyper::from_data(data);
  double alpha0 = cfg.alpha_bar;
  if (cfg.alpha_mode == AlphaMode::SolveEkn) alpha0 = alpha_for_fixed_ekn(data.n(), cfg.ekn_target, cfg.K);

  std::vector<Trace> out(static_cast<std::size_t>(opts.n_chains));
  if (opts.parallel && opts.n_chains > 1) {
    std::vector<std::thread> pool;
    for (long c = 0; c < opts.n_chains; ++c)
      pool.emplace_back([&, c] { out[static_cast<std::size_t>(c)] = run_one(data, cfg, hyper, opts, c, alpha0); });
    for (auto& th : pool) th.join();
  } else {
    for (long c = 0; c < opts.n_chains; ++c) out[static_cast<std::size_t>(c)] = run_one(data, cfg, hyper, opts, c, alpha0);
  }
  return out;
}

double gelman_rubin(const std::vector<std::vector<double>>& chains) {
  const std::size_t m = chains.size();
  if (m < 2) throw DomainError("gelman_rubin: need at least two chains");
  const std::size_t n = chains.front().size();
  if (n < 2) throw DomainError("gelman_rubin: chains are too short");
  for (const auto& c : chains)
    if (c.size() != n) throw DomainError("gelman_rubin: chains differ in length");
  std::vector<double> means(m);
  double W = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0.0;
    for (double v : chains[j]) s += v;
    means[j] = s / static_cast<double>(n);
    double ss = 0.0;
    for (double v : chains[j]) ss += (v - means[j]) * (v - means[j]);
    W += ss / static_cast<double>(n);
  }
  W /= static_cast<double>(m);
  double grand = 0.0;
  for (double v : means) grand += v;
  grand /= static_cast<double>(m);
  double B = 0.0;
  for (double v : means) B += (v - grand) * (v - grand);
  B *= static_cast<double>(n) / static_cast<double>(m - 1);
  if (W == 0.0) return B == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return std::sqrt((W + B / static_cast<double>(n)) / W);
}

std::vector<double> trace_scalar(const Trace& t, TraceScalar scalar) {
  std::vector<double> v;
  v.reserve(t.records.size());
  for (const auto& r : t.records) {
    switch (scalar) {
      case TraceScalar::LogLik: v.push_back(r.loglik); break;
      case TraceScalar::KOccupied: v.push_back(static_cast<double>(r.k_occupied)); break;
      case TraceScalar::AlphaBar: v.push_back(r.alpha_bar); break;
    }
  }
  return v;
}

double gelman_rubin(const std::vector<Trace>& traces, TraceScalar scalar) {
  std::vector<std::vector<double>> chains;
  for (const auto& t : traces) chains.push_back(trace_scalar(t, scalar));
  return gelman_rubin(chains);
}

std::vector<double> posterior_kn_pmf(const std::vector<Trace>& traces) {
  std::size_t K = 0, total = 0;
  for (const auto& t : traces)
    for (const auto& r : t.records) K = std::max(K, r.w_sorted.size());
  std::vector<double> pmf(K + 1, 0.0);
  for (const auto& t : traces) {
    for (const auto& r : t.records) {
      pmf[static_cast<std::size_t>(r.k_occupied)] += 1.0;
      ++total;
    }
  }
  if (total == 0) throw DomainError("posterior_kn_pmf: empty trace");
  for (double& p : pmf) p /= static_cast<double>(total);
  return pmf;
}

double posterior_mean_kn(const std::vector<Trace>& traces) {
  const auto pmf = posterior_kn_pmf(traces);
  double m = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) m += static_cast<double>(k) * pmf[k];
  return m;
}

double quantile(std::vector<double> v, double p) {
  if (v.empty()) throw DomainError("quantile: empty sample");
  std::sort(v.begin(), v.end());
  const double h = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::vector<RankSummary> posterior_sorted_weights(const std::vector<Trace>& traces) {
  std::size_t K = 0;
  for (const auto& t : traces)
    for (const auto& r : t.records) K = std::max(K, r.w_sorted.size());
  std::vector<RankSummary> out;
  for (std::size_t rank = 0; rank < K; ++rank) {
    std::vector<double> v;
    for (const auto& t : traces)
      for (const auto& r : t.records)
        if (rank < r.w_sorted.size()) v.push_back(r.w_sorted[rank]);
    if (v.empty()) continue;
    RankSummary s;
    s.rank = static_cast<long>(rank + 1);
    s.min = quantile(v, 0.0);
    s.q1 = quantile(v, 0.25);
    s.median = quantile(v, 0.5);
    s.q3 = quantile(v, 0.75);
    s.max = quantile(v, 1.0);
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    out.push_back(s);
  }
  return out;
}

std::vector<AtomicMeasure> export_mixing_measures(const Trace& trace) {
  std::vector<AtomicMeasure> out;
  out.reserve(trace.snapshots.size());
  for (const auto& s : trace.snapshots) {
    AtomicMeasure g;
    double total = 0.0;
    for (std::size_t k = 0; k < s.weights.size(); ++k) {
      if (!(s.weights[k] > 0.0)) continue;
      g.weights.push_back(s.weights[k]);
      g.locations.push_back(s.locations[k]);
      total += s.weights[k];
    }
    for (double& w : g.weights) w /= total;
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<AtomicMeasure> export_mixing_measures(const std::vector<Trace>& traces) {
  std::vector<AtomicMeasure> out;
  for (const auto& t : traces) {
    auto part = export_mixing_measures(t);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

double alpha_for_fixed_ekn(long n, double target, long K) {
  if (!(target > 1.0 && target < static_cast<double>(K)))
    throw BracketError("E[K_n] target must lie strictly between 1 and K");
  const double alpha = solve_param_for_ekn(ProcessSpec::dmp(1.0, K), "alpha", n, target, 1e-8, 1e8, 1e-10);
  return alpha / static_cast<double>(K);
}

}  // namespace bnpmix
