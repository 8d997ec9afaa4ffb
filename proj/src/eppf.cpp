#include "bnpmix/eppf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bnpmix/errors.hpp"
#include "bnpmix/special.hpp"

namespace bnpmix {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

EppfEvaluator::EppfEvaluator(const ProcessSpec& spec, long n_max, long precision_bits)
    : spec_(spec), n_max_(n_max) {
  spec.validate();
  if (n_max < 1) throw DomainError("EppfEvaluator: n_max must be >= 1");
  if (spec.is_gibbs()) {
    gibbs_ = std::make_shared<const GibbsWeights>(spec, n_max, precision_bits);
  } else if (spec.family == Family::NGGM) {
    gibbs_ = std::make_shared<const GibbsWeights>(ProcessSpec::ngg(spec.sigma, spec.beta), n_max, precision_bits);
  }
  if (spec.family == Family::PYM || spec.family == Family::NGGM) gfc_.emplace(spec.sigma, n_max);
}

const std::vector<LogValue>& EppfEvaluator::ngg_row(long n) const {
  std::lock_guard<std::mutex> lock(row_mutex_);
  auto it = ngg_rows_.find(n);
  if (it == ngg_rows_.end()) it = ngg_rows_.emplace(n, gibbs_->log_row(n)).first;
  return it->second;
}

std::vector<double> EppfEvaluator::log_latent_count_weights(const Composition& comp) const {
  if (!gfc_) throw DomainError("latent count weights are defined for PYM / NGGM only");
  std::vector<long> blocks = comp.blocks();
  std::sort(blocks.begin(), blocks.end(), std::greater<>());
  if (blocks.front() > n_max_) throw DomainError("EppfEvaluator: block exceeds n_max");
  // Sequences indexed l - 1; the convolution of k of them is indexed m - k.
  std::vector<double> acc = gfc_->row(blocks.front());
  for (std::size_t i = 1; i < blocks.size(); ++i) acc = log_convolve(acc, gfc_->row(blocks[i]));
  return acc;
}

LogValue EppfEvaluator::eval_sorted(const std::vector<long>& blocks, long n) const {
  const long k = static_cast<long>(blocks.size());
  switch (spec_.family) {
    case Family::DP:
    case Family::PY:
    case Family::NGG: {
      const LogValue v = gibbs_->log_vnk(n, k);
      if (v.is_zero()) return v;
      long double s = v.log() - log_factorial(k);
      const double one_minus_sigma = 1.0 - spec_.sigma;
      for (long b : blocks) s += log_pochhammer(one_minus_sigma, b - 1);
      return LogValue::from_log(s);
    }
    case Family::DMP: {
      if (k > spec_.K) return LogValue::zero();
      const double a = spec_.alpha / static_cast<double>(spec_.K);
      long double s = log_binomial(spec_.K, k) - log_pochhammer(spec_.alpha, n);
      for (long b : blocks) s += log_pochhammer(a, b);
      return LogValue::from_log(s);
    }
    case Family::PYM: {
      if (k > spec_.K) return LogValue::zero();
      const auto w = log_latent_count_weights(Composition(blocks));
      const double ratio = spec_.alpha / spec_.sigma;
      const double log_k = std::log(static_cast<double>(spec_.K));
      std::vector<double> terms(w.size());
      for (std::size_t j = 0; j < w.size(); ++j) {
        const double m = static_cast<double>(k) + static_cast<double>(j);
        terms[j] = w[j] + std::lgamma(ratio + m) - m * log_k;
      }
      const long double s = log_binomial(spec_.K, k) - log_pochhammer(spec_.alpha + 1.0, n - 1) -
                            std::log(spec_.sigma) - std::lgamma(ratio + 1.0) + log_sum_exp(terms);
      return LogValue::from_log(s);
    }
    case Family::NGGM: {
      if (k > spec_.K) return LogValue::zero();
      const auto w = log_latent_count_weights(Composition(blocks));
      const auto& v = ngg_row(n);
      const double log_ks = std::log(static_cast<double>(spec_.K)) + std::log(spec_.sigma);
      std::vector<double> terms(w.size());
      for (std::size_t j = 0; j < w.size(); ++j) {
        const long m = k + static_cast<long>(j);
        const LogValue& vm = v[static_cast<std::size_t>(m - 1)];
        terms[j] = vm.is_zero() ? kNegInf
                                : static_cast<double>(vm.log()) + w[j] - static_cast<double>(m) * log_ks;
      }
      return LogValue::from_log(log_binomial(spec_.K, k) + log_sum_exp(terms));
    }
  }
  throw DomainError("log_eppf: unsupported family");
}

LogValue EppfEvaluator::log_eppf(const Composition& comp) const {
  if (comp.n() > n_max_) {
    throw DomainError("log_eppf: n=" + std::to_string(comp.n()) + " exceeds evaluator n_max=" +
                      std::to_string(n_max_));
  }
  std::vector<long> blocks = comp.blocks();
  std::sort(blocks.begin(), blocks.end(), std::greater<>());
  return eval_sorted(blocks, comp.n());
}

LogValue EppfEvaluator::log_eppf_unordered(const Composition& comp) const {
  const LogValue p = log_eppf(comp);
  if (p.is_zero()) return p;
  return LogValue::from_log(p.log() + log_factorial(comp.k()));
}

long double EppfEvaluator::log_ratio_split(const Composition& comp, std::size_t block) const {
  if (block >= comp.blocks().size()) throw DomainError("log_ratio_split: block index out of range");
  const long nl = comp[block];
  if (nl < 2) throw DomainError("log_ratio_split: the donor block must have at least two elements");
  const long k = comp.k();
  const long n = comp.n();
  switch (spec_.family) {
    case Family::DP:
    case Family::PY:
    case Family::NGG:
      // (k+1) V_{n,k} / V_{n,k+1} (n_l - 1 - sigma)
      return std::log(static_cast<long double>(k + 1)) + gibbs_->log_ratio(n, k) +
             std::log(static_cast<long double>(nl) - 1.0L - spec_.sigma);
    case Family::DMP: {
      if (k > spec_.K) throw DomainError("log_ratio_split: p(A) = 0 for k > K");
      if (k + 1 > spec_.K) return std::numeric_limits<long double>::infinity();
      const long double a = static_cast<long double>(spec_.alpha) / static_cast<long double>(spec_.K);
      return std::log(static_cast<long double>(k + 1)) + std::log(a + static_cast<long double>(nl) - 1.0L) -
             std::log(static_cast<long double>(spec_.K - k)) - std::log(a);
    }
    default: {
      const LogValue pa = log_eppf(comp);
      const LogValue pb = log_eppf(comp.split_singleton(block));
      if (pb.is_zero()) {
        return pa.is_zero() ? -std::numeric_limits<long double>::infinity()
                            : std::numeric_limits<long double>::infinity();
      }
      return pa.log() - pb.log();
    }
  }
}

LogValue log_eppf(const ProcessSpec& spec, const Composition& comp, long precision_bits) {
  return EppfEvaluator(spec, comp.n(), precision_bits).log_eppf(comp);
}

long double log_eppf_ratio_split(const ProcessSpec& spec, const Composition& comp, std::size_t block,
                                 long precision_bits) {
  return EppfEvaluator(spec, comp.n(), precision_bits).log_ratio_split(comp, block);
}

}  // namespace bnpmix
