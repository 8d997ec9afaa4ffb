#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bnpmix/ot.hpp"

namespace bnpmix {

/// (log n / n)^{1/4}.
double rate_overfitted(double n);
/// M (log n)^{-1/eta}.
double rate_py(double n, double eta, double M);

struct MtmConfig {
  double c = 1.0;
  double omega_n = 1.0;
  double r = 2.0;
  std::optional<double> truncation_exponent;  // default r / (r + 1)
  std::uint64_t seed = 0;
  bool average_locations = false;  // merged atom moves to the weighted mean

  double exponent() const { return truncation_exponent.value_or(r / (r + 1.0)); }
  double threshold() const;
  void validate() const;
};

enum class MtmStage { Merge, Truncate };

struct MtmEvent {
  MtmStage stage;
  std::size_t atom;    // index in the input measure
  std::size_t target;  // input index of the receiving atom (= atom if it had no receiver)
  double weight;       // mass moved
  double distance;
  bool tie = false;    // another candidate receiver was exactly as close
};

struct MtmOutcome {
  AtomicMeasure measure;  // empty when k_tilde = 0
  long k_tilde = 0;
  std::vector<std::size_t> kept;  // input indices of the surviving atoms
  std::vector<MtmEvent> audit;
};

/// Merge-Truncate-Merge. Stage 1 visits atoms in a weight-proportional random
/// order (fixed by cfg.seed) and folds each into its nearest already-kept atom
/// when the two are within omega_n. Stage 2 drops every kept atom whose weight
/// is at most c omega_n^exponent and hands its mass to the nearest survivor.
/// Ties go to the earlier-kept atom.
MtmOutcome mtm_apply(const AtomicMeasure& g, const MtmConfig& cfg);

struct PathPoint {
  double c = 0.0;
  std::vector<double> pmf;  // pmf[k] = posterior probability that K~ = k
  double mean = 0.0;
  long map = 0;
};

struct Plateau {
  bool found = false;
  long value = 0;
  double c_lo = 0.0, c_hi = 0.0;
  std::size_t first = 0, last = 0;  // grid indices
};

struct RegularizationPath {
  std::vector<PathPoint> points;
  /// `select_plateau` applied to `runs`.
  Plateau plateau;
  /// Every maximal constant-MAP run, in grid order.
  std::vector<Plateau> runs;

  /// Longest run with the given MAP value (found = false if none).
  Plateau plateau_at(long value) const;
};

/// A run counts as a plateau when its MAP is nonzero and it spans at least
/// this fraction of the scanned c range.
inline constexpr double kPlateauFraction = 0.1;

bool is_plateau(const Plateau& run, double grid_lo, double grid_hi);

/// First qualifying run in increasing c: the first K~ that stays put as the
/// truncation grows. Falls back to the widest nonzero run (which then fails
/// `is_plateau`); found = false when every MAP is zero.
Plateau select_plateau(const std::vector<Plateau>& runs, double grid_lo, double grid_hi);

/// MTM on every sample at every c. Seeds are derived per (sample, c index)
/// from base.seed. Runs in parallel; results do not depend on thread count.
RegularizationPath regularization_path(const std::vector<AtomicMeasure>& samples, const std::vector<double>& c_grid,
                                       const MtmConfig& base, unsigned threads = 0);

/// Evenly spaced grid on [lo, hi] with `count` points.
std::vector<double> linear_grid(double lo, double hi, long count);

struct Calibration {
  double c_min = 0.0;  // K~ MAP close to the atom count
  double c_max = 0.0;  // K~ = 0 for every sample
  RegularizationPath path;
  bool plateau_found = false;
  long k_plateau = 0;
  double plateau_lo = 0.0, plateau_hi = 0.0;
  std::string message;
};

/// Finds c_min (MAP of K~ within one of `k_target_hint`, or the largest
/// MAP seen) and c_max (all K~ = 0) by doubling / halving, scans `grid_points`
/// regular values between them and reports the selected plateau when it
/// qualifies and spans at least `min_plateau_points` grid values.
Calibration mtm_calibrate(const std::vector<AtomicMeasure>& samples, const MtmConfig& base, long k_target_hint,
                          long grid_points = 100, long min_plateau_points = 3);

}  // namespace bnpmix
