#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace bnpmix {

enum class Family { DP, PY, NGG, DMP, PYM, NGGM };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

/// A clustering prior: family tag plus the parameters that family uses.
///
/// Unused fields are ignored. Construct through the named factories, which
/// validate; `validate()` can be called on hand-built values.
struct ProcessSpec {
  Family family = Family::DP;
  double alpha = 1.0;  // concentration (DP, PY, DMP, PYM)
  double sigma = 0.0;  // discount (PY, NGG, PYM, NGGM)
  double beta = 0.0;   // NGG / NGGM
  long K = 0;          // number of components (DMP, PYM, NGGM)

  static ProcessSpec dp(double alpha);
  static ProcessSpec py(double sigma, double alpha);
  static ProcessSpec ngg(double sigma, double beta);
  static ProcessSpec dmp(double alpha, long K);
  static ProcessSpec pym(double sigma, double alpha, long K);
  static ProcessSpec nggm(double sigma, double beta, long K);

  /// Throws DomainError when the parameters are outside the family's range.
  void validate() const;

  bool is_gibbs() const { return family == Family::DP || family == Family::PY || family == Family::NGG; }
  bool is_finite() const { return !is_gibbs(); }
  /// Largest possible number of blocks for n observations.
  long max_blocks(long n) const { return is_finite() ? std::min(n, K) : n; }

  std::string describe() const;
  friend bool operator==(const ProcessSpec&, const ProcessSpec&) = default;
};

/// Block sizes (n_1, ..., n_k) of an ordered partition.
class Composition {
 public:
  Composition() = default;
  /// Throws DomainError if empty or any block is < 1.
  explicit Composition(std::vector<long> blocks);

  const std::vector<long>& blocks() const { return blocks_; }
  long n() const { return n_; }
  long k() const { return static_cast<long>(blocks_.size()); }
  long operator[](std::size_t i) const { return blocks_[i]; }

  /// Remove one element from `block` and append it as a new singleton.
  Composition split_singleton(std::size_t block) const;
  /// Add one element to an existing block (block < k) or open a new one (block == k).
  Composition add_element(std::size_t block) const;

 private:
  std::vector<long> blocks_;
  long n_ = 0;
};

}  // namespace bnpmix
