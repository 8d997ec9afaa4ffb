#include "bnpmix/process.hpp"

#include <cmath>
#include <sstream>

#include "bnpmix/errors.hpp"

namespace bnpmix {

std::string to_string(Family f) {
  switch (f) {
    case Family::DP: return "DP";
    case Family::PY: return "PY";
    case Family::NGG: return "NGG";
    case Family::DMP: return "DMP";
    case Family::PYM: return "PYM";
    case Family::NGGM: return "NGGM";
  }
  return "?";
}

Family family_from_string(const std::string& s) {
  std::string u;
  for (char c : s) u.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (u == "DP") return Family::DP;
  if (u == "PY") return Family::PY;
  if (u == "NGG") return Family::NGG;
  if (u == "DMP") return Family::DMP;
  if (u == "PYM") return Family::PYM;
  if (u == "NGGM") return Family::NGGM;
  throw DomainError("unknown process family '" + s + "'");
}

ProcessSpec ProcessSpec::dp(double alpha) {
  ProcessSpec s{Family::DP, alpha, 0.0, 0.0, 0};
  s.validate();
  return s;
}
ProcessSpec ProcessSpec::py(double sigma, double alpha) {
  ProcessSpec s{Family::PY, alpha, sigma, 0.0, 0};
  s.validate();
  return s;
}
ProcessSpec ProcessSpec::ngg(double sigma, double beta) {
  ProcessSpec s{Family::NGG, 0.0, sigma, beta, 0};
  s.validate();
  return s;
}
ProcessSpec ProcessSpec::dmp(double alpha, long K) {
  ProcessSpec s{Family::DMP, alpha, 0.0, 0.0, K};
  s.validate();
  return s;
}
ProcessSpec ProcessSpec::pym(double sigma, double alpha, long K) {
  ProcessSpec s{Family::PYM, alpha, sigma, 0.0, K};
  s.validate();
  return s;
}
ProcessSpec ProcessSpec::nggm(double sigma, double beta, long K) {
  ProcessSpec s{Family::NGGM, 0.0, sigma, beta, K};
  s.validate();
  return s;
}

void ProcessSpec::validate() const {
  auto fail = [this](const std::string& why) { throw DomainError(to_string(family) + ": " + why); };
  auto finite = [](double x) { return std::isfinite(x); };
  switch (family) {
    case Family::DP:
      if (!(finite(alpha) && alpha > 0)) fail("requires alpha > 0");
      break;
    case Family::PY:
      if (!(sigma >= 0 && sigma < 1)) fail("requires sigma in [0,1)");
      if (!(finite(alpha) && alpha > -sigma)) fail("requires alpha > -sigma");
      // alpha = -sigma is excluded; the (alpha+1)_{n-1} denominator also needs alpha > -1.
      break;
    case Family::NGG:
      if (!(sigma > 0 && sigma < 1)) fail("requires sigma in (0,1)");
      if (!(finite(beta) && beta >= 0)) fail("requires beta >= 0");
      break;
    case Family::DMP:
      if (!(finite(alpha) && alpha > 0)) fail("requires alpha > 0");
      if (K < 1) fail("requires K >= 1");
      break;
    case Family::PYM:
      if (!(sigma > 0 && sigma < 1)) fail("requires sigma in (0,1); request DMP explicitly for sigma = 0");
      if (!(finite(alpha) && alpha > -sigma)) fail("requires alpha > -sigma");
      if (K < 1) fail("requires K >= 1");
      break;
    case Family::NGGM:
      if (!(sigma > 0 && sigma < 1)) fail("requires sigma in (0,1); request DMP explicitly for sigma = 0");
      if (!(finite(beta) && beta >= 0)) fail("requires beta >= 0");
      if (K < 1) fail("requires K >= 1");
      break;
  }
}

std::string ProcessSpec::describe() const {
  std::ostringstream os;
  os.precision(10);
  os << to_string(family) << "(";
  switch (family) {
    case Family::DP: os << "alpha=" << alpha; break;
    case Family::PY: os << "sigma=" << sigma << ",alpha=" << alpha; break;
    case Family::NGG: os << "sigma=" << sigma << ",beta=" << beta; break;
    case Family::DMP: os << "alpha=" << alpha << ",K=" << K; break;
    case Family::PYM: os << "sigma=" << sigma << ",alpha=" << alpha << ",K=" << K; break;
    case Family::NGGM: os << "sigma=" << sigma << ",beta=" << beta << ",K=" << K; break;
  }
  os << ")";
  return os.str();
}

Composition::Composition(std::vector<long> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw DomainError("Composition: at least one block required");
  for (long b : blocks_) {
    if (b < 1) throw DomainError("Composition: every block must be >= 1");
    n_ += b;
  }
}

Composition Composition::split_singleton(std::size_t block) const {
  if (block >= blocks_.size()) throw DomainError("Composition::split_singleton: block index out of range");
  if (blocks_[block] < 2) throw DomainError("Composition::split_singleton: cannot split a singleton block");
  std::vector<long> b = blocks_;
  b[block] -= 1;
  b.push_back(1);
  return Composition(std::move(b));
}

Composition Composition::add_element(std::size_t block) const {
  std::vector<long> b = blocks_;
  if (block < b.size()) {
    b[block] += 1;
  } else if (block == b.size()) {
    b.push_back(1);
  } else {
    throw DomainError("Composition::add_element: block index out of range");
  }
  return Composition(std::move(b));
}

}  // namespace bnpmix
