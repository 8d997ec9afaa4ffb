#pragma once

#include <memory>
#include <vector>

#include "bnpmix/bigfloat.hpp"
#include "bnpmix/log_value.hpp"
#include "bnpmix/process.hpp"

namespace bnpmix {

inline constexpr long kDefaultPrecisionBits = 512;

/// NGG partition weights
///   V_{n,k} = e^beta sigma^{k-1} / Gamma(n)
///             * sum_{i=0}^{n-1} binom(n-1, i) (-1)^i beta^{i/sigma} Gamma(k - i/sigma, beta)
/// in extended precision, for 1 <= k <= n <= n_max.
///
/// `target_bits` is the accuracy the caller wants; the working precision adds
/// guard bits for the alternating-sum cancellation (about 1.3 bits per
/// observation) and for the incomplete-gamma recurrence. Each evaluation
/// measures the cancellation it actually suffered and throws PrecisionError if
/// fewer than `target_bits` survive; `make_ngg_weights` retries with more bits.
///
/// When 1/sigma is an exact integer every shape k - i/sigma is an integer and a
/// single incomplete-gamma ladder serves all (n, k); otherwise each i gets its
/// own ladder over k, computed per call.
class NggWeights {
 public:
  NggWeights(double sigma, double beta, long n_max, long target_bits = kDefaultPrecisionBits,
             long extra_bits = 0);

  double sigma() const { return sigma_; }
  double beta() const { return beta_; }
  long n_max() const { return n_max_; }
  long target_bits() const { return target_bits_; }
  long working_bits() const { return bits_; }

  BigFloat vnk(long n, long k) const;
  /// V_{n,k} for k = 1..n (element 0 is k = 1).
  std::vector<BigFloat> row(long n) const;

  /// sigma and beta as the exact binary values used internally.
  const BigFloat& sigma_mp() const { return sigma_mp_; }
  const BigFloat& beta_mp() const { return beta_mp_; }

 private:
  // Incomplete gamma at shape k - i/sigma.
  const BigFloat& ladder_at(long k, long i) const;
  BigFloat sum_for(long n, long k, const std::vector<BigFloat>& coef,
                   const std::vector<BigFloat>* column_gammas) const;
  std::vector<BigFloat> coefficients(long n) const;
  BigFloat prefactor(long n, long k) const;

  double sigma_;
  double beta_;
  long n_max_;
  long target_bits_;
  long bits_;
  bool integer_shapes_ = false;
  long inv_sigma_ = 0;
  long shape_top_ = 0;
  BigFloat sigma_mp_;
  BigFloat beta_mp_;
  BigFloat exp_beta_;
  BigFloat beta_pow_;  // beta^{1/sigma}
  std::vector<BigFloat> ladder_;  // integer-shape case: Gamma(shape_top_ - j, beta)
};

/// NggWeights with automatic refinement: retries with more guard bits on
/// PrecisionError (up to three times) before propagating it.
std::shared_ptr<const NggWeights> make_ngg_weights(double sigma, double beta, long n_max,
                                                   long target_bits = kDefaultPrecisionBits);

/// log V_{n,k} for DP / PY / NGG with any n <= n_max.
///
/// DP and PY use closed forms in double precision; NGG delegates to a shared
/// NggWeights built once for n_max.
class GibbsWeights {
 public:
  GibbsWeights(const ProcessSpec& spec, long n_max, long precision_bits = kDefaultPrecisionBits);

  const ProcessSpec& spec() const { return spec_; }
  long n_max() const { return n_max_; }

  LogValue log_vnk(long n, long k) const;
  /// log V_{n,k} for k = 1..n.
  std::vector<LogValue> log_row(long n) const;
  /// log(V_{n,k} / V_{n,k+1}) with closed-form cancellation for DP and PY
  /// (constant in n: -log(alpha) and -log(alpha + k sigma)).
  long double log_ratio(long n, long k) const;

  /// Null for DP / PY.
  const NggWeights* ngg() const { return ngg_.get(); }

 private:
  ProcessSpec spec_;
  long n_max_;
  std::shared_ptr<const NggWeights> ngg_;
};

/// log V_{n,k} for a Gibbs-type spec (DP, PY, NGG). V_{1,1} = 1 for every family.
LogValue log_vnk(const ProcessSpec& spec, long n, long k, long precision_bits = kDefaultPrecisionBits);

/// Full triangle of log V_{n,k}, 1 <= k <= n <= n_max, for caching to disk.
struct VnkTable {
  ProcessSpec spec;
  long n_max = 0;
  long precision_bits = 0;
  std::vector<long double> log_values;  // row-major triangle; -inf encodes zero

  static VnkTable build(const ProcessSpec& spec, long n_max, long precision_bits = kDefaultPrecisionBits);
  long double log_vnk(long n, long k) const;
};

}  // namespace bnpmix
