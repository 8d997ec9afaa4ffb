#include "bnpmix/mtm.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include "bnpmix/errors.hpp"
#include "bnpmix/rng.hpp"

namespace bnpmix {

double rate_overfitted(double n) {
  if (!(n >= 2.0)) throw DomainError("rate_overfitted: n must be >= 2");
  return std::pow(std::log(n) / n, 0.25);
}

double rate_py(double n, double eta, double M) {
  if (!(n >= 2.0)) throw DomainError("rate_py: n must be >= 2");
  if (!(eta > 0.0 && eta <= 2.0)) throw DomainError("rate_py: eta must be in (0, 2]");
  if (!(M > 0.0)) throw DomainError("rate_py: M must be positive");
  return M * std::pow(std::log(n), -1.0 / eta);
}

double MtmConfig::threshold() const { return c * std::pow(omega_n, exponent()); }

void MtmConfig::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("MTM: c must be positive");
  if (!(omega_n > 0.0) || !std::isfinite(omega_n)) throw DomainError("MTM: omega_n must be positive");
  if (!(r >= 1.0)) throw DomainError("MTM: r must be >= 1");
  if (!std::isfinite(exponent())) throw DomainError("MTM: truncation exponent must be finite");
}

namespace {

struct Kept {
  std::size_t index;
  double weight;
  std::vector<double> location;
};

// Nearest entry of `pool` (restricted to `allowed` when non-null); ties keep the first.
std::size_t nearest(const std::vector<Kept>& pool, const std::vector<double>& x, const std::vector<char>* allowed,
                    double& dist, bool& tie) {
  std::size_t best = pool.size();
  dist = std::numeric_limits<double>::infinity();
  tie = false;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (allowed && !(*allowed)[i]) continue;
    const double d = euclidean_distance(pool[i].location, x);
    if (d < dist) {
      dist = d;
      best = i;
      tie = false;
    } else if (d == dist) {
      tie = true;
    }
  }
  return best;
}

}  // namespace

MtmOutcome mtm_apply(const AtomicMeasure& g, const MtmConfig& cfg) {
  if (g.size() == 0) throw DomainError("mtm_apply: empty measure");
  g.validate(1e-9);
  cfg.validate();
  MtmOutcome out;

  // Weight-proportional order without replacement: sort by log(U) / w descending.
  Rng rng(cfg.seed);
  std::vector<std::pair<double, std::size_t>> keys(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) keys[i] = {std::log(uniform_open(rng)) / g.weights[i], i};
  std::stable_sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  std::vector<Kept> kept;
  for (const auto& [key, idx] : keys) {
    (void)key;
    const auto& x = g.locations[idx];
    double d;
    bool tie;
    const std::size_t j = nearest(kept, x, nullptr, d, tie);
    if (j < kept.size() && d <= cfg.omega_n) {
      Kept& k = kept[j];
      if (cfg.average_locations) {
        const double total = k.weight + g.weights[idx];
        for (std::size_t t = 0; t < x.size(); ++t)
          k.location[t] = (k.weight * k.location[t] + g.weights[idx] * x[t]) / total;
      }
      k.weight += g.weights[idx];
      out.audit.push_back({MtmStage::Merge, idx, k.index, g.weights[idx], d, tie});
    } else {
      kept.push_back({idx, g.weights[idx], x});
    }
  }

  std::stable_sort(kept.begin(), kept.end(), [](const Kept& a, const Kept& b) { return a.weight > b.weight; });
  const double thr = cfg.threshold();
  std::vector<char> survives(kept.size());
  bool any = false;
  for (std::size_t i = 0; i < kept.size(); ++i) any |= (survives[i] = kept[i].weight > thr) != 0;
  if (!any) {
    for (const auto& k : kept) out.audit.push_back({MtmStage::Truncate, k.index, k.index, k.weight, 0.0, false});
    return out;
  }
  std::vector<double> final_weight(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) final_weight[i] = survives[i] ? kept[i].weight : 0.0;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (survives[i]) continue;
    double d;
    bool tie;
    const std::size_t j = nearest(kept, kept[i].location, &survives, d, tie);
    final_weight[j] += kept[i].weight;
    out.audit.push_back({MtmStage::Truncate, kept[i].index, kept[j].index, kept[i].weight, d, tie});
  }
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (!survives[i]) continue;
    out.measure.weights.push_back(final_weight[i]);
    out.measure.locations.push_back(kept[i].location);
    out.kept.push_back(kept[i].index);
  }
  out.k_tilde = static_cast<long>(out.measure.size());
  return out;
}

Plateau RegularizationPath::plateau_at(long value) const {
  Plateau best;
  for (const auto& r : runs) {
    if (r.value != value) continue;
    if (!best.found || r.c_hi - r.c_lo > best.c_hi - best.c_lo) best = r;
  }
  return best;
}

bool is_plateau(const Plateau& run, double grid_lo, double grid_hi) {
  return run.found && run.value != 0 && run.c_hi - run.c_lo >= kPlateauFraction * std::abs(grid_hi - grid_lo);
}

Plateau select_plateau(const std::vector<Plateau>& runs, double grid_lo, double grid_hi) {
  for (const auto& r : runs)
    if (is_plateau(r, grid_lo, grid_hi)) return r;
  Plateau widest;
  for (const auto& r : runs)
    if (r.value != 0 && (!widest.found || r.c_hi - r.c_lo > widest.c_hi - widest.c_lo)) widest = r;
  return widest;
}

std::vector<double> linear_grid(double lo, double hi, long count) {
  if (count < 1) throw DomainError("linear_grid: count must be >= 1");
  if (count == 1) return {lo};
  std::vector<double> g(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i)
    g[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return g;
}

RegularizationPath regularization_path(const std::vector<AtomicMeasure>& samples, const std::vector<double>& c_grid,
                                       const MtmConfig& base, unsigned threads) {
  if (samples.empty()) throw DomainError("regularization_path: no samples");
  if (c_grid.empty()) throw DomainError("regularization_path: empty c grid");
  std::size_t max_atoms = 0;
  for (const auto& s : samples) max_atoms = std::max(max_atoms, s.size());
  const std::size_t nc = c_grid.size(), width = max_atoms + 1;

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, samples.size()));
  std::vector<std::vector<long>> counts(threads, std::vector<long>(nc * width, 0));
  std::vector<std::exception_ptr> errors(threads);
  auto work = [&](unsigned t) {
    try {
      for (std::size_t s = t; s < samples.size(); s += threads) {
        for (std::size_t ci = 0; ci < nc; ++ci) {
          MtmConfig cfg = base;
          cfg.c = c_grid[ci];
          cfg.seed = derive_seed(base.seed, {s, ci});
          ++counts[t][ci * width + static_cast<std::size_t>(mtm_apply(samples[s], cfg).k_tilde)];
        }
      }
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work, t);
  work(0);
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  RegularizationPath path;
  for (std::size_t ci = 0; ci < nc; ++ci) {
    PathPoint p;
    p.c = c_grid[ci];
    p.pmf.assign(width, 0.0);
    for (const auto& c : counts)
      for (std::size_t k = 0; k < width; ++k) p.pmf[k] += static_cast<double>(c[ci * width + k]);
    for (std::size_t k = 0; k < width; ++k) {
      p.pmf[k] /= static_cast<double>(samples.size());
      p.mean += static_cast<double>(k) * p.pmf[k];
      if (p.pmf[k] > p.pmf[static_cast<std::size_t>(p.map)]) p.map = static_cast<long>(k);
    }
    path.points.push_back(std::move(p));
  }
  for (std::size_t i = 0; i < nc;) {
    std::size_t j = i;
    while (j + 1 < nc && path.points[j + 1].map == path.points[i].map) ++j;
    path.runs.push_back(Plateau{true, path.points[i].map, c_grid[i], c_grid[j], i, j});
    i = j + 1;
  }
  path.plateau = select_plateau(path.runs, c_grid.front(), c_grid.back());
  return path;
}

Calibration mtm_calibrate(const std::vector<AtomicMeasure>& samples, const MtmConfig& base, long k_target_hint,
                          long grid_points, long min_plateau_points) {
  if (samples.empty()) throw DomainError("mtm_calibrate: no samples");
  auto path_at = [&](double c) { return regularization_path(samples, {c}, base).points.front(); };
  Calibration cal;

  double c = base.c > 0 ? base.c : 1.0;
  for (int it = 0; it < 60 && path_at(c).map < k_target_hint - 1; ++it) c *= 0.5;
  cal.c_min = c;
  c = std::max(cal.c_min, 1e-12);
  for (int it = 0; it < 80; ++it) {
    const auto p = path_at(c);
    if (p.pmf[0] == 1.0) break;
    c *= 2.0;
  }
  cal.c_max = c;

  cal.path = regularization_path(samples, linear_grid(cal.c_min, cal.c_max, grid_points), base);
  const Plateau& pl = cal.path.plateau;
  if (is_plateau(pl, cal.c_min, cal.c_max) && static_cast<long>(pl.last - pl.first + 1) >= min_plateau_points) {
    cal.plateau_found = true;
    cal.k_plateau = pl.value;
    cal.plateau_lo = pl.c_lo;
    cal.plateau_hi = pl.c_hi;
    cal.message = "plateau at K~ = " + std::to_string(pl.value);
  } else {
    cal.message = "no plateau: the sample size should be increased";
  }
  return cal;
}

}  // namespace bnpmix
