#include "bnpmix/prior_clusters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "bnpmix/eppf.hpp"
#include "bnpmix/errors.hpp"
#include "bnpmix/gfc.hpp"
#include "bnpmix/rng.hpp"
#include "bnpmix/special.hpp"

namespace bnpmix {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double PriorKnPmf::probability(long k) const {
  if (k < 1 || k > k_max()) return 0.0;
  return pmf[static_cast<std::size_t>(k - 1)];
}

double PriorKnPmf::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) m += static_cast<double>(i + 1) * pmf[i];
  return m;
}

double PriorKnPmf::total() const {
  double s = 0.0;
  for (double p : pmf) s += p;
  return s;
}

PriorKnPmf prior_kn_gibbs(const ProcessSpec& spec, long n, long precision_bits) {
  spec.validate();
  if (!spec.is_gibbs()) throw DomainError("prior_kn_gibbs: " + spec.describe() + " is not Gibbs-type");
  if (n < 1) throw DomainError("prior_kn_gibbs: n must be >= 1");
  PriorKnPmf out{spec, n, std::vector<double>(static_cast<std::size_t>(n)), PmfMethod::Exact};
  const GibbsWeights weights(spec, n, precision_bits);
  const auto v = weights.log_row(n);
  if (spec.family == Family::DP) {
    const auto s = log_stirling1_table(n);
    for (long k = 1; k <= n; ++k)
      out.pmf[static_cast<std::size_t>(k - 1)] =
          std::exp(static_cast<double>(v[static_cast<std::size_t>(k - 1)].log()) + s[stirling_index(n, k)]);
    return out;
  }
  const GfcTable gfc(spec.sigma, n);
  const double log_sigma = std::log(spec.sigma);
  for (long k = 1; k <= n; ++k) {
    const LogValue& vk = v[static_cast<std::size_t>(k - 1)];
    out.pmf[static_cast<std::size_t>(k - 1)] =
        vk.is_zero() ? 0.0
                     : std::exp(static_cast<double>(vk.log()) + gfc.log_c(n, k) - static_cast<double>(k) * log_sigma);
  }
  return out;
}

PriorKnPmf prior_kn_dmp(const ProcessSpec& spec, long n) {
  spec.validate();
  if (spec.family != Family::DMP) throw DomainError("prior_kn_dmp: expects a DMP spec");
  if (n < 1) throw DomainError("prior_kn_dmp: n must be >= 1");
  const long kmax = std::min(n, spec.K);
  const long double c = static_cast<long double>(spec.alpha) / static_cast<long double>(spec.K);
  const long double K = static_cast<long double>(spec.K);
  // Forward chain on K_m: a new observation opens one of the K - k empty
  // labels with probability c (K - k) / (alpha + m).
  std::vector<long double> p(static_cast<std::size_t>(kmax + 1), 0.0L), next(p.size(), 0.0L);
  p[1] = 1.0L;
  for (long m = 1; m < n; ++m) {
    const long top = std::min(m + 1, kmax);
    const long double denom = static_cast<long double>(spec.alpha) + static_cast<long double>(m);
    for (long k = 1; k <= top; ++k) {
      const long double kk = static_cast<long double>(k);
      const long double stay = p[static_cast<std::size_t>(k)] * (kk * c + static_cast<long double>(m));
      const long double open = p[static_cast<std::size_t>(k - 1)] * c * (K - kk + 1.0L);
      next[static_cast<std::size_t>(k)] = (stay + open) / denom;
    }
    std::swap(p, next);
  }
  PriorKnPmf out{spec, n, std::vector<double>(static_cast<std::size_t>(kmax)), PmfMethod::Exact};
  for (long k = 1; k <= kmax; ++k) out.pmf[static_cast<std::size_t>(k - 1)] = static_cast<double>(p[static_cast<std::size_t>(k)]);
  return out;
}

PriorKnPmf prior_kn_exact(const ProcessSpec& spec, long n, long precision_bits) {
  if (spec.family == Family::DMP) return prior_kn_dmp(spec, n);
  if (spec.is_gibbs()) return prior_kn_gibbs(spec, n, precision_bits);
  throw DomainError("no exact K_n pmf for " + spec.describe() + "; use prior_kn_mc");
}

namespace {

// Draws one final block count by sequential allocation.
class PredictiveSampler {
 public:
  PredictiveSampler(const ProcessSpec& spec, long n, long bits) : spec_(spec), n_(n) {
    if (spec.is_gibbs()) {
      const GibbsWeights w(spec, n, bits);
      log_v_.resize(static_cast<std::size_t>(n + 1));
      for (long m = 1; m <= n; ++m) {
        const auto row = w.log_row(m);
        auto& dst = log_v_[static_cast<std::size_t>(m)];
        dst.reserve(row.size());
        for (const auto& x : row) dst.push_back(static_cast<double>(x.log()));
      }
    } else if (spec.family != Family::DMP) {
      eval_ = std::make_unique<EppfEvaluator>(spec, n, bits);
    }
  }

  long draw(Rng& rng) const {
    std::vector<long> blocks{1};
    std::vector<double> lw;
    for (long m = 1; m < n_; ++m) {
      const long k = static_cast<long>(blocks.size());
      const bool can_open = k < spec_.max_blocks(m + 1);
      lw.assign(static_cast<std::size_t>(k) + (can_open ? 1 : 0), kNegInf);
      fill_weights(blocks, m, can_open, lw);
      const std::size_t j = sample_log_categorical(rng, lw.data(), lw.size());
      if (j == blocks.size()) blocks.push_back(1);
      else ++blocks[j];
    }
    return static_cast<long>(blocks.size());
  }

 private:
  void fill_weights(const std::vector<long>& blocks, long m, bool can_open, std::vector<double>& lw) const {
    const std::size_t k = blocks.size();
    switch (spec_.family) {
      case Family::DMP: {
        const double a = spec_.alpha / static_cast<double>(spec_.K);
        for (std::size_t j = 0; j < k; ++j) lw[j] = std::log(static_cast<double>(blocks[j]) + a);
        if (can_open) lw[k] = std::log(static_cast<double>(spec_.K - static_cast<long>(k)) * a);
        return;
      }
      case Family::DP:
      case Family::PY:
      case Family::NGG: {
        const auto& cur = log_v_[static_cast<std::size_t>(m)];
        const auto& nxt = log_v_[static_cast<std::size_t>(m + 1)];
        const double base = nxt[k - 1] - cur[k - 1];
        for (std::size_t j = 0; j < k; ++j) lw[j] = base + std::log(static_cast<double>(blocks[j]) - spec_.sigma);
        if (can_open) lw[k] = nxt[k] - cur[k - 1];
        return;
      }
      default: {
        const Composition a(blocks);
        const double pa = static_cast<double>(eval_->log_eppf(a).log());
        for (std::size_t j = 0; j < k; ++j) lw[j] = static_cast<double>(eval_->log_eppf(a.add_element(j)).log()) - pa;
        if (can_open)
          lw[k] = std::log(static_cast<double>(k + 1)) + static_cast<double>(eval_->log_eppf(a.add_element(k)).log()) - pa;
        return;
      }
    }
  }

  ProcessSpec spec_;
  long n_;
  std::vector<std::vector<double>> log_v_;
  std::unique_ptr<EppfEvaluator> eval_;
};

}  // namespace

PriorKnPmf prior_kn_mc(const ProcessSpec& spec, long n, long draws, std::uint64_t seed, long precision_bits,
                       unsigned threads) {
  spec.validate();
  if (n < 1) throw DomainError("prior_kn_mc: n must be >= 1");
  if (draws < 1) throw DomainError("prior_kn_mc: draws must be >= 1");
  const long kmax = spec.max_blocks(n);
  const PredictiveSampler sampler(spec, n, precision_bits);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<long>(threads, draws));

  std::vector<std::vector<long>> counts(threads, std::vector<long>(static_cast<std::size_t>(kmax), 0));
  auto work = [&](unsigned t) {
    const long lo = draws * t / threads, hi = draws * (t + 1) / threads;
    for (long d = lo; d < hi; ++d) {
      Rng rng = make_rng(seed, {static_cast<std::uint64_t>(d)});
      ++counts[t][static_cast<std::size_t>(sampler.draw(rng) - 1)];
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work, t);
  work(0);
  for (auto& th : pool) th.join();

  PriorKnPmf out{spec, n, std::vector<double>(static_cast<std::size_t>(kmax), 0.0), PmfMethod::MonteCarlo, draws, seed};
  for (const auto& c : counts)
    for (std::size_t k = 0; k < c.size(); ++k) out.pmf[k] += static_cast<double>(c[k]);
  for (double& p : out.pmf) p /= static_cast<double>(draws);
  return out;
}

double prior_mean_kn(const ProcessSpec& spec, long n, long precision_bits) {
  if (spec.family == Family::DMP) {
    spec.validate();
    if (n < 1) throw DomainError("prior_mean_kn: n must be >= 1");
    if (spec.K == 1) return 1.0;
    const double K = static_cast<double>(spec.K);
    const double log_q = log_pochhammer(spec.alpha - spec.alpha / K, n) - log_pochhammer(spec.alpha, n);
    return -K * std::expm1(log_q);
  }
  return prior_kn_exact(spec, n, precision_bits).mean();
}

ProcessSpec with_param(ProcessSpec spec, const std::string& name, double value) {
  if (name == "alpha") spec.alpha = value;
  else if (name == "sigma") spec.sigma = value;
  else if (name == "beta") spec.beta = value;
  else throw DomainError("unknown free parameter '" + name + "' (expected alpha, sigma or beta)");
  return spec;
}

double solve_param_for_ekn(const ProcessSpec& base, const std::string& free_param, long n, double target, double lo,
                           double hi, double tol, long precision_bits) {
  if (!(lo < hi)) throw DomainError("solve_param_for_ekn: empty bracket");
  auto f = [&](double x) { return prior_mean_kn(with_param(base, free_param, x), n, precision_bits) - target; };
  double flo = f(lo), fhi = f(hi);
  if (std::abs(flo) <= tol) return lo;
  if (std::abs(fhi) <= tol) return hi;
  if ((flo < 0) == (fhi < 0)) {
    throw BracketError("E[K_" + std::to_string(n) + "] over " + free_param + " in [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "] ranges over [" + std::to_string(flo + target) + ", " +
                       std::to_string(fhi + target) + "], which does not contain " + std::to_string(target));
  }
  for (int it = 0; it < 200; ++it) {
    // Geometric midpoint on wide positive brackets, arithmetic otherwise.
    const double mid = (lo > 0 && hi / lo > 4.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::abs(fm) <= tol) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-14 * std::max(1.0, std::abs(hi))) return 0.5 * (lo + hi);
  }
  return 0.5 * (lo + hi);
}

double solve_param_for_ekn(const ProcessSpec& base, const std::string& free_param, long n, double target) {
  if (free_param == "alpha") {
    const double lo = base.family == Family::PY ? -base.sigma + 1e-9 : 1e-6;
    return solve_param_for_ekn(base, free_param, n, target, lo, 1e6);
  }
  if (free_param == "beta") return solve_param_for_ekn(base, free_param, n, target, 1e-6, 2000.0);
  if (free_param == "sigma") return solve_param_for_ekn(base, free_param, n, target, 1e-6, 1.0 - 1e-6);
  throw DomainError("unknown free parameter '" + free_param + "'");
}

}  // namespace bnpmix
