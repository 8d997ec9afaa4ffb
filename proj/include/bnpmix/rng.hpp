#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace bnpmix {

using Rng = std::mt19937_64;

/// Seed derived from a base seed and a stream path (chain index, draw index,
/// grid cell, ...). Distinct paths give independent-looking streams and the
/// result does not depend on the order in which streams are created.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  return Rng(derive_seed(seed, path));
}

/// Uniform on the open interval (0, 1).
double uniform_open(Rng& rng);

double standard_normal(Rng& rng);

/// log of a Gamma(shape, 1) draw. For shape < 1 uses
/// log G(shape + 1) + log(U) / shape so tiny shapes do not underflow.
double log_gamma_variate(Rng& rng, double shape);

/// Index drawn with probability proportional to exp(log_w[i]).
std::size_t sample_log_categorical(Rng& rng, const double* log_w, std::size_t count);

}  // namespace bnpmix
