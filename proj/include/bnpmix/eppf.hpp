#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "bnpmix/gfc.hpp"
#include "bnpmix/log_value.hpp"
#include "bnpmix/process.hpp"
#include "bnpmix/vnk.hpp"

namespace bnpmix {

/// Exchangeable partition probability for every supported family.
///
/// The canonical value is the probability of an *ordered* partition with the
/// given block sizes, including the 1/k! (Gibbs) or binom(K, k) (multinomial)
/// normalization; `log_eppf_unordered` multiplies by k!. Blocks are evaluated
/// in sorted order so permuting a composition yields bit-identical results.
///
/// PYM and NGGM sum over latent counts l_i in {1..n_i}. The sum factorizes
/// through m = |l|: per-block sequences C(n_i, l; sigma) are convolved in log
/// space and then contracted against Gamma(alpha/sigma + m) (PYM) or
/// V_{n,m} / (K sigma)^m (NGGM). All summands are positive.
class EppfEvaluator {
 public:
  /// `n_max` bounds the partition sizes this evaluator will see.
  EppfEvaluator(const ProcessSpec& spec, long n_max, long precision_bits = kDefaultPrecisionBits);

  const ProcessSpec& spec() const { return spec_; }
  long n_max() const { return n_max_; }

  /// Ordered-partition probability p(A). Zero when k > K for finite families.
  LogValue log_eppf(const Composition& comp) const;
  /// k! p(A).
  LogValue log_eppf_unordered(const Composition& comp) const;

  /// log[p(A) / p(B)] where B moves one element of `block` into a new
  /// singleton. Uses the closed-form cancellation for Gibbs families and DMP;
  /// +inf when p(B) = 0 (k + 1 > K). Throws DomainError for a singleton block.
  long double log_ratio_split(const Composition& comp, std::size_t block) const;

  /// log of sum_{|l| = m} prod_i C(n_i, l_i; sigma) for m = k..n (element 0 is m = k).
  std::vector<double> log_latent_count_weights(const Composition& comp) const;

  const GibbsWeights* gibbs() const { return gibbs_.get(); }

 private:
  LogValue eval_sorted(const std::vector<long>& blocks, long n) const;
  const std::vector<LogValue>& ngg_row(long n) const;

  ProcessSpec spec_;
  long n_max_;
  std::shared_ptr<const GibbsWeights> gibbs_;  // DP/PY/NGG, and the NGG weights behind NGGM
  std::optional<GfcTable> gfc_;                // PYM / NGGM
  mutable std::mutex row_mutex_;
  mutable std::map<long, std::vector<LogValue>> ngg_rows_;
};

/// One-shot helpers; build an evaluator sized to the composition.
LogValue log_eppf(const ProcessSpec& spec, const Composition& comp, long precision_bits = kDefaultPrecisionBits);
long double log_eppf_ratio_split(const ProcessSpec& spec, const Composition& comp, std::size_t block,
                                 long precision_bits = kDefaultPrecisionBits);

}  // namespace bnpmix
