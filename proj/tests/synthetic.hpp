// Constructed posterior samples for the MTM tests: three well separated true
// atoms, each split into a few nearby pieces, plus far-away atoms of tiny
// weight. W_r to the truth is small relative to omega by construction.
#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "bnpmix/ot.hpp"

namespace synthetic {

struct Sample {
  bnpmix::AtomicMeasure g;
  bnpmix::AtomicMeasure truth;
  double max_spurious = 0.0;  // largest far-away atom weight
  double min_true = 0.0;      // smallest total weight around a true atom
};

inline bnpmix::AtomicMeasure truth() {
  return {{0.5, 0.3, 0.2}, {{0.8, 0.8}, {0.8, -0.8}, {-0.8, 0.8}}};
}

inline Sample make(std::uint64_t seed, double omega, long max_spurious_atoms = 4) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Sample s;
  s.truth = truth();

  const long n_spur = 1 + static_cast<long>(u(rng) * static_cast<double>(max_spurious_atoms));
  std::vector<double> spur_w;
  double spur_total = 0.0;
  for (long i = 0; i < n_spur; ++i) {
    spur_w.push_back(1e-5 + 2.4e-4 * u(rng));
    spur_total += spur_w.back();
  }

  s.min_true = 1.0;
  for (std::size_t a = 0; a < 3; ++a) {
    const double w_true = s.truth.weights[a] * (1.0 - spur_total);
    const long pieces = 1 + static_cast<long>(u(rng) * 3.0);
    std::vector<double> share(static_cast<std::size_t>(pieces));
    double tot = 0.0;
    for (auto& x : share) tot += (x = 0.2 + u(rng));
    for (long p = 0; p < pieces; ++p) {
      const double radius = omega / 5.0 * u(rng), angle = 2.0 * M_PI * u(rng);
      s.g.weights.push_back(w_true * share[static_cast<std::size_t>(p)] / tot);
      s.g.locations.push_back({s.truth.locations[a][0] + radius * std::cos(angle),
                               s.truth.locations[a][1] + radius * std::sin(angle)});
    }
    s.min_true = std::min(s.min_true, w_true);
  }
  // Far atoms on a ring of radius 2 around the origin, at least 30 degrees apart.
  for (long i = 0; i < n_spur; ++i) {
    const double angle = (static_cast<double>(i) + 0.3 * u(rng)) * (M_PI / 6.0) + M_PI;
    s.g.weights.push_back(spur_w[static_cast<std::size_t>(i)]);
    s.g.locations.push_back({2.0 * std::cos(angle), 2.0 * std::sin(angle)});
    s.max_spurious = std::max(s.max_spurious, spur_w[static_cast<std::size_t>(i)]);
  }
  return s;
}

}  // namespace synthetic
