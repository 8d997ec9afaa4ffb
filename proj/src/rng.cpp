#include "bnpmix/rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "bnpmix/errors.hpp"

namespace bnpmix {

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (path.size() + 1) + 1);
  words.push_back(static_cast<std::uint32_t>(path.size()));
  auto push = [&](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto p : path) push(p);
  std::seed_seq seq(words.begin(), words.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

double uniform_open(Rng& rng) {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double standard_normal(Rng& rng) {
  // Marsaglia polar method; no cached second value so the stream is
  // independent of call history within a distribution object.
  for (;;) {
    const double u = 2.0 * uniform_open(rng) - 1.0;
    const double v = 2.0 * uniform_open(rng) - 1.0;
    const double s = u * u + v * v;
    if (s >= 1.0 || s == 0.0) continue;
    return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

namespace {

// Marsaglia-Tsang for shape >= 1, returning the log of the draw.
double log_gamma_ge1(Rng& rng, double shape) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open(rng);
    if (u < 1.0 - 0.0331 * x * x * x * x) return std::log(d) + std::log(v);
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return std::log(d) + std::log(v);
  }
}

}  // namespace

double log_gamma_variate(Rng& rng, double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) throw DomainError("gamma variate: shape must be positive");
  if (shape >= 1.0) return log_gamma_ge1(rng, shape);
  return log_gamma_ge1(rng, shape + 1.0) + std::log(uniform_open(rng)) / shape;
}

std::size_t sample_log_categorical(Rng& rng, const double* log_w, std::size_t count) {
  const double m = *std::max_element(log_w, log_w + count);
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) total += std::exp(log_w[i] - m);
  double u = uniform_open(rng) * total;
  for (std::size_t i = 0; i < count; ++i) {
    u -= std::exp(log_w[i] - m);
    if (u <= 0.0) return i;
  }
  // Rounding left a sliver; return the last index with positive weight.
  for (std::size_t i = count; i-- > 0;)
    if (std::isfinite(log_w[i])) return i;
  return count - 1;
}

}  // namespace bnpmix
