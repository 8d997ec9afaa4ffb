#pragma once

#include <cstddef>
#include <vector>

namespace bnpmix {

/// Finite discrete measure sum_i w_i delta_{x_i} on R^d.
struct AtomicMeasure {
  std::vector<double> weights;
  std::vector<std::vector<double>> locations;

  std::size_t size() const { return weights.size(); }
  std::size_t dim() const { return locations.empty() ? 0 : locations.front().size(); }
  double total_mass() const;

  /// Throws DomainError unless weights are positive, sum to 1 within `tol`,
  /// and locations share one dimension.
  void validate(double tol = 1e-12) const;
  /// Atoms at identical locations combined (first occurrence order kept).
  AtomicMeasure merged_duplicates() const;
};

double euclidean_distance(const std::vector<double>& a, const std::vector<double>& b);

/// Optimal coupling of two discrete distributions with given supply and demand.
struct TransportPlan {
  struct Flow {
    std::size_t from, to;
    double mass;
  };
  double cost = 0.0;
  std::vector<Flow> flows;  // basic cells with positive mass
  long pivots = 0;
};

/// Exact transportation simplex on an m x n cost matrix (row-major). Supply
/// and demand must be nonnegative with equal totals (relative 1e-9); demand is
/// rescaled to the supply total.
TransportPlan solve_transport(const std::vector<double>& supply, const std::vector<double>& demand,
                              const std::vector<double>& cost);

/// W_r(P, Q) with Euclidean ground metric, solved exactly.
double wasserstein(const AtomicMeasure& p, const AtomicMeasure& q, double r);

}  // namespace bnpmix
