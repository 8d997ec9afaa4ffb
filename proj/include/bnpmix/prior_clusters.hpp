#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bnpmix/process.hpp"
#include "bnpmix/vnk.hpp"

namespace bnpmix {

enum class PmfMethod { Exact, MonteCarlo };

/// Distribution of the number of clusters K_n under a prior.
struct PriorKnPmf {
  ProcessSpec spec;
  long n = 0;
  std::vector<double> pmf;  // pmf[k - 1] = P(K_n = k)
  PmfMethod method = PmfMethod::Exact;
  long draws = 0;           // Monte Carlo only
  std::uint64_t seed = 0;   // Monte Carlo only

  long k_max() const { return static_cast<long>(pmf.size()); }
  double probability(long k) const;
  double mean() const;
  double total() const;
};

/// Exact pmf for DP / PY / NGG: P(K_n = k) = V_{n,k} C(n,k;sigma) / sigma^k,
/// with unsigned Stirling numbers in place of C/sigma^k for the DP.
PriorKnPmf prior_kn_gibbs(const ProcessSpec& spec, long n, long precision_bits = kDefaultPrecisionBits);

/// Exact pmf for the Dirichlet multinomial process by a log-space dynamic
/// program over (n, k); O(n min(n, K)).
PriorKnPmf prior_kn_dmp(const ProcessSpec& spec, long n);

/// Sequential Monte Carlo draws of K_n from the predictive rule implied by the
/// EPPF. Deterministic for a given seed; draws run in parallel with per-draw
/// streams. `threads` = 0 uses the hardware concurrency.
PriorKnPmf prior_kn_mc(const ProcessSpec& spec, long n, long draws, std::uint64_t seed,
                       long precision_bits = kDefaultPrecisionBits, unsigned threads = 0);

/// Exact pmf for any family that has one (DP, PY, NGG, DMP).
PriorKnPmf prior_kn_exact(const ProcessSpec& spec, long n, long precision_bits = kDefaultPrecisionBits);

/// E[K_n]. DMP uses K (1 - (alpha - alpha/K)_n / (alpha)_n).
double prior_mean_kn(const ProcessSpec& spec, long n, long precision_bits = kDefaultPrecisionBits);

/// Bisection on `free_param` ("alpha", "beta" or "sigma") so that
/// |E[K_n] - target| <= tol. Throws BracketError if E[K_n] at the endpoints
/// does not straddle the target.
double solve_param_for_ekn(const ProcessSpec& base, const std::string& free_param, long n, double target,
                           double lo, double hi, double tol = 1e-3,
                           long precision_bits = kDefaultPrecisionBits);
/// Same with a default bracket for the parameter.
double solve_param_for_ekn(const ProcessSpec& base, const std::string& free_param, long n, double target);

/// Copy of `spec` with one named parameter replaced.
ProcessSpec with_param(ProcessSpec spec, const std::string& name, double value);

}  // namespace bnpmix
