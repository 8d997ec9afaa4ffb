#include "bnpmix/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bnpmix/errors.hpp"

namespace bnpmix {

double AtomicMeasure::total_mass() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

void AtomicMeasure::validate(double tol) const {
  if (weights.size() != locations.size()) throw DomainError("AtomicMeasure: weights and locations differ in length");
  if (weights.empty()) throw DomainError("AtomicMeasure: no atoms");
  const std::size_t d = dim();
  for (std::size_t i = 0; i < size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) throw DomainError("AtomicMeasure: weights must be positive");
    if (locations[i].size() != d) throw DomainError("AtomicMeasure: inconsistent location dimension");
  }
  if (std::abs(total_mass() - 1.0) > tol) {
    throw DomainError("AtomicMeasure: weights sum to " + std::to_string(total_mass()) + ", not 1");
  }
}

AtomicMeasure AtomicMeasure::merged_duplicates() const {
  AtomicMeasure out;
  for (std::size_t i = 0; i < size(); ++i) {
    auto it = std::find(out.locations.begin(), out.locations.end(), locations[i]);
    if (it == out.locations.end()) {
      out.weights.push_back(weights[i]);
      out.locations.push_back(locations[i]);
    } else {
      out.weights[static_cast<std::size_t>(it - out.locations.begin())] += weights[i];
    }
  }
  return out;
}

double euclidean_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw DomainError("distance: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

namespace {

struct Cell {
  std::size_t i, j;
  double x;
};

}  // namespace

TransportPlan solve_transport(const std::vector<double>& supply_in, const std::vector<double>& demand_in,
                              const std::vector<double>& cost) {
  const std::size_t m = supply_in.size(), n = demand_in.size();
  if (m == 0 || n == 0) throw DomainError("transport: empty marginal");
  if (cost.size() != m * n) throw DomainError("transport: cost matrix has the wrong size");
  double ts = 0.0, td = 0.0;
  for (double s : supply_in) {
    if (!(s >= 0.0)) throw DomainError("transport: negative supply");
    ts += s;
  }
  for (double d : demand_in) {
    if (!(d >= 0.0)) throw DomainError("transport: negative demand");
    td += d;
  }
  if (!(ts > 0.0) || std::abs(ts - td) > 1e-9 * ts) throw DomainError("transport: supply and demand totals differ");
  std::vector<double> supply = supply_in, demand = demand_in;
  for (double& d : demand) d *= ts / td;

  // Northwest-corner basis with exactly m + n - 1 cells (degenerate ones kept).
  std::vector<Cell> basis;
  basis.reserve(m + n - 1);
  {
    std::size_t i = 0, j = 0;
    for (;;) {
      const double q = std::min(supply[i], demand[j]);
      basis.push_back({i, j, q});
      supply[i] -= q;
      demand[j] -= q;
      if (i == m - 1 && j == n - 1) break;
      if (j == n - 1 || (i < m - 1 && supply[i] <= demand[j])) ++i;
      else ++j;
    }
  }

  double cmax = 0.0;
  for (double c : cost) cmax = std::max(cmax, std::abs(c));
  const double eps = 1e-12 * (1.0 + cmax);
  const std::size_t nodes = m + n;
  std::vector<char> is_basic(m * n, 0);
  for (const auto& c : basis) is_basic[c.i * n + c.j] = 1;

  std::vector<std::vector<std::size_t>> adj(nodes);
  std::vector<double> pot(nodes);
  std::vector<char> seen(nodes);
  std::vector<std::size_t> parent_cell(nodes), order;
  order.reserve(nodes);

  TransportPlan plan;
  const long bland_after = 50 * static_cast<long>(nodes) + 1000;
  const long hard_cap = 200 * static_cast<long>(nodes) * static_cast<long>(nodes) + 100000;
  for (;;) {
    for (auto& a : adj) a.clear();
    for (std::size_t b = 0; b < basis.size(); ++b) {
      adj[basis[b].i].push_back(b);
      adj[m + basis[b].j].push_back(b);
    }
    // Potentials u_i + v_j = c_ij on the spanning tree rooted at row 0.
    std::fill(seen.begin(), seen.end(), 0);
    order.assign(1, 0);
    seen[0] = 1;
    pot[0] = 0.0;
    for (std::size_t h = 0; h < order.size(); ++h) {
      const std::size_t u = order[h];
      for (std::size_t b : adj[u]) {
        const std::size_t w = u < m ? m + basis[b].j : basis[b].i;
        if (seen[w]) continue;
        seen[w] = 1;
        const double c = cost[basis[b].i * n + basis[b].j];
        pot[w] = c - pot[u];
        order.push_back(w);
      }
    }
    if (order.size() != nodes) throw NumericError("transport: basis is not a spanning tree");

    const bool bland = plan.pivots > bland_after;
    std::size_t ei = 0, ej = 0;
    double best = -eps;
    bool found = false;
    for (std::size_t i = 0; i < m && !(bland && found); ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (is_basic[i * n + j]) continue;
        const double rc = cost[i * n + j] - pot[i] - pot[m + j];
        if (rc < best) {
          best = rc;
          ei = i;
          ej = j;
          found = true;
          if (bland) break;
        }
      }
    }
    if (!found) break;
    if (++plan.pivots > hard_cap) throw NumericError("transport: pivot limit exceeded");

    // Tree path from column ej back to row ei.
    std::fill(seen.begin(), seen.end(), 0);
    order.assign(1, m + ej);
    seen[m + ej] = 1;
    for (std::size_t h = 0; h < order.size() && !seen[ei]; ++h) {
      const std::size_t u = order[h];
      for (std::size_t b : adj[u]) {
        const std::size_t w = u < m ? m + basis[b].j : basis[b].i;
        if (seen[w]) continue;
        seen[w] = 1;
        parent_cell[w] = b;
        order.push_back(w);
      }
    }
    std::vector<std::size_t> path;  // from the cell touching row ei toward column ej
    for (std::size_t u = ei; u != m + ej;) {
      const std::size_t b = parent_cell[u];
      path.push_back(b);
      u = u < m ? m + basis[b].j : basis[b].i;
    }
    // Cells adjacent to the entering cell along the cycle lose flow: path
    // position 0 (shares row ei) and every other one after it.
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leave = path.size();
    for (std::size_t p = 0; p < path.size(); p += 2) {
      const Cell& c = basis[path[p]];
      const bool better = c.x < theta || (bland && c.x == theta && path[p] < path[leave]);
      if (better) {
        theta = c.x;
        leave = p;
      }
    }
    for (std::size_t p = 0; p < path.size(); ++p) {
      Cell& c = basis[path[p]];
      c.x += (p % 2 == 0) ? -theta : theta;
      if (c.x < 0.0) c.x = 0.0;
    }
    const std::size_t out = path[leave];
    is_basic[basis[out].i * n + basis[out].j] = 0;
    basis[out] = {ei, ej, theta};
    is_basic[ei * n + ej] = 1;
  }

  for (const auto& c : basis) {
    if (c.x <= 0.0) continue;
    plan.flows.push_back({c.i, c.j, c.x});
    plan.cost += c.x * cost[c.i * n + c.j];
  }
  return plan;
}

double wasserstein(const AtomicMeasure& p_in, const AtomicMeasure& q_in, double r) {
  if (!(r >= 1.0)) throw DomainError("wasserstein: order r must be >= 1");
  p_in.validate(1e-9);
  q_in.validate(1e-9);
  if (p_in.dim() != q_in.dim()) throw DomainError("wasserstein: location dimensions differ");
  const AtomicMeasure p = p_in.merged_duplicates(), q = q_in.merged_duplicates();
  std::vector<double> cost(p.size() * q.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < q.size(); ++j) {
      double d = euclidean_distance(p.locations[i], q.locations[j]);
      if (d < 1e-14) d = 0.0;
      cost[i * q.size() + j] = std::pow(d, r);
    }
  }
  const double c = solve_transport(p.weights, q.weights, cost).cost;
  return c <= 0.0 ? 0.0 : std::pow(c, 1.0 / r);
}

}  // namespace bnpmix
