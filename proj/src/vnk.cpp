#include "bnpmix/vnk.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bnpmix/errors.hpp"
#include "bnpmix/incgamma.hpp"
#include "bnpmix/special.hpp"

namespace bnpmix {

namespace {

long cancellation_guard(long n_max) { return static_cast<long>(std::ceil(1.3 * static_cast<double>(n_max))) + 100; }

void check_nk(long n, long k, long n_max) {
  if (n < 1 || k < 1 || k > n) throw DomainError("V_{n,k} requires 1 <= k <= n");
  if (n > n_max) throw DomainError("V_{n,k}: n=" + std::to_string(n) + " exceeds n_max=" + std::to_string(n_max));
}

}  // namespace

NggWeights::NggWeights(double sigma, double beta, long n_max, long target_bits, long extra_bits)
    : sigma_(sigma), beta_(beta), n_max_(n_max), target_bits_(target_bits) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw DomainError("NGG: sigma must be in (0,1)");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw DomainError("NGG: beta must be >= 0");
  if (n_max < 1) throw DomainError("NGG: n_max must be >= 1");
  if (target_bits < 16) throw DomainError("NGG: precision must be at least 16 bits");
  bits_ = target_bits + cancellation_guard(n_max) + ladder_guard_bits(beta) + extra_bits;
  sigma_mp_ = BigFloat(sigma, bits_);
  beta_mp_ = BigFloat(beta, bits_);
  exp_beta_ = exp(beta_mp_);
  if (beta <= 0.0) return;

  const BigFloat inv = BigFloat(1.0, bits_) / sigma_mp_;
  beta_pow_ = pow(beta_mp_, inv);
  if (inv.is_integer()) {
    integer_shapes_ = true;
    inv_sigma_ = inv.to_long();
    shape_top_ = n_max;
    const long bottom = 1 - inv_sigma_ * (n_max - 1);
    ladder_ = incomplete_gamma_ladder(BigFloat::from_long(shape_top_, bits_), shape_top_ - bottom + 1, beta_mp_);
  }
}

const BigFloat& NggWeights::ladder_at(long k, long i) const {
  const long shape = k - i * inv_sigma_;
  return ladder_[static_cast<std::size_t>(shape_top_ - shape)];
}

std::vector<BigFloat> NggWeights::coefficients(long n) const {
  // (-1)^i binom(n-1, i) beta^{i/sigma}
  std::vector<BigFloat> c;
  c.reserve(static_cast<std::size_t>(n));
  c.emplace_back(1.0, bits_);
  for (long i = 1; i < n; ++i) {
    BigFloat next = c.back() * beta_pow_;
    next *= (n - i);
    next /= i;
    c.push_back(-next);
  }
  return c;
}

BigFloat NggWeights::prefactor(long n, long k) const {
  // e^beta sigma^{k-1} / Gamma(n)
  BigFloat p = exp_beta_ * pow(sigma_mp_, k - 1);
  p /= gamma(BigFloat::from_long(n, bits_));
  return p;
}

BigFloat NggWeights::sum_for(long n, long k, const std::vector<BigFloat>& coef,
                             const std::vector<BigFloat>* column_gammas) const {
  BigFloat sum(bits_);
  double max_log2 = -std::numeric_limits<double>::infinity();
  for (long i = 0; i < n; ++i) {
    const BigFloat& g = column_gammas ? column_gammas[i][static_cast<std::size_t>(n - k)] : ladder_at(k, i);
    BigFloat term = coef[static_cast<std::size_t>(i)] * g;
    max_log2 = std::max(max_log2, term.log2_abs());
    sum += term;
  }
  const double lost = max_log2 - sum.log2_abs();
  const double achieved = static_cast<double>(bits_) - lost - static_cast<double>(ladder_guard_bits(beta_)) -
                          std::log2(static_cast<double>(n) + 1.0) - 2.0;
  if (sum.sign() <= 0 || achieved < static_cast<double>(target_bits_)) {
    throw PrecisionError("NGG V_{" + std::to_string(n) + "," + std::to_string(k) + "}: only " +
                         std::to_string(static_cast<long>(achieved)) + " of " + std::to_string(target_bits_) +
                         " bits survived cancellation at " + std::to_string(bits_) + " working bits");
  }
  return sum;
}

BigFloat NggWeights::vnk(long n, long k) const {
  check_nk(n, k, n_max_);
  if (beta_ <= 0.0) {
    // Normalized sigma-stable process.
    BigFloat v = pow(sigma_mp_, k - 1) * gamma(BigFloat::from_long(k, bits_));
    v /= gamma(BigFloat::from_long(n, bits_));
    return v;
  }
  const auto coef = coefficients(n);
  if (integer_shapes_) return prefactor(n, k) * sum_for(n, k, coef, nullptr);

  std::vector<std::vector<BigFloat>> cols;
  cols.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    // Shapes k - i/sigma for k = n .. 1; only the entry at k is used but the
    // ladder start must be the direct evaluation at the top.
    BigFloat a0 = BigFloat::from_long(k, bits_) - BigFloat::from_long(i, bits_) / sigma_mp_;
    auto g = incomplete_gamma_ladder(a0, 1, beta_mp_);
    std::vector<BigFloat> col(static_cast<std::size_t>(n), BigFloat(bits_));
    col[static_cast<std::size_t>(n - k)] = std::move(g.front());
    cols.push_back(std::move(col));
  }
  return prefactor(n, k) * sum_for(n, k, coef, cols.data());
}

std::vector<BigFloat> NggWeights::row(long n) const {
  check_nk(n, 1, n_max_);
  std::vector<BigFloat> out;
  out.reserve(static_cast<std::size_t>(n));
  if (beta_ <= 0.0) {
    for (long k = 1; k <= n; ++k) out.push_back(vnk(n, k));
    return out;
  }
  const auto coef = coefficients(n);
  std::vector<std::vector<BigFloat>> cols;
  if (!integer_shapes_) {
    cols.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
      BigFloat a0 = BigFloat::from_long(n, bits_) - BigFloat::from_long(i, bits_) / sigma_mp_;
      cols.push_back(incomplete_gamma_ladder(a0, n, beta_mp_));
    }
  }
  BigFloat pre = prefactor(n, 1);
  for (long k = 1; k <= n; ++k) {
    if (k > 1) pre *= sigma_mp_;
    out.push_back(pre * sum_for(n, k, coef, integer_shapes_ ? nullptr : cols.data()));
  }
  return out;
}

std::shared_ptr<const NggWeights> make_ngg_weights(double sigma, double beta, long n_max, long target_bits) {
  long extra = 0;
  for (int attempt = 0;; ++attempt) {
    auto w = std::make_shared<const NggWeights>(sigma, beta, n_max, target_bits, extra);
    try {
      // k = 1 at the largest n suffers the worst cancellation.
      (void)w->vnk(n_max, 1);
      return w;
    } catch (const PrecisionError&) {
      if (attempt >= 3) throw;
      extra = 2 * extra + n_max + 256;
    }
  }
}

GibbsWeights::GibbsWeights(const ProcessSpec& spec, long n_max, long precision_bits)
    : spec_(spec), n_max_(n_max) {
  spec.validate();
  if (!spec.is_gibbs()) throw DomainError("GibbsWeights: " + spec.describe() + " is not a Gibbs-type family");
  if (n_max < 1) throw DomainError("GibbsWeights: n_max must be >= 1");
  if (spec.family == Family::NGG) ngg_ = make_ngg_weights(spec.sigma, spec.beta, n_max, precision_bits);
}

LogValue GibbsWeights::log_vnk(long n, long k) const {
  check_nk(n, k, n_max_);
  switch (spec_.family) {
    case Family::DP: {
      const long double a = spec_.alpha;
      return LogValue::from_log(static_cast<long double>(k) * std::log(a) - log_pochhammer(spec_.alpha, n));
    }
    case Family::PY: {
      long double s = 0.0L;
      for (long i = 1; i < k; ++i) {
        const long double f = spec_.alpha + static_cast<long double>(i) * spec_.sigma;
        if (f <= 0) return LogValue::zero();
        s += std::log(f);
      }
      return LogValue::from_log(s - log_pochhammer(spec_.alpha + 1.0, n - 1));
    }
    case Family::NGG: {
      const BigFloat v = ngg_->vnk(n, k);
      return LogValue::from_log(v.log_abs());
    }
    default:
      break;
  }
  throw DomainError("GibbsWeights: unsupported family");
}

std::vector<LogValue> GibbsWeights::log_row(long n) const {
  check_nk(n, 1, n_max_);
  std::vector<LogValue> out;
  out.reserve(static_cast<std::size_t>(n));
  if (spec_.family == Family::NGG) {
    for (const auto& v : ngg_->row(n)) out.push_back(LogValue::from_log(v.log_abs()));
    return out;
  }
  for (long k = 1; k <= n; ++k) out.push_back(log_vnk(n, k));
  return out;
}

long double GibbsWeights::log_ratio(long n, long k) const {
  check_nk(n, k, n_max_);
  if (k + 1 > n) throw DomainError("log_ratio requires k < n");
  switch (spec_.family) {
    case Family::DP:
      return -std::log(static_cast<long double>(spec_.alpha));
    case Family::PY:
      return -std::log(static_cast<long double>(spec_.alpha) + static_cast<long double>(k) * spec_.sigma);
    default: {
      const BigFloat a = ngg_->vnk(n, k);
      const BigFloat b = ngg_->vnk(n, k + 1);
      return log(a / b).to_double() + 0.0L;
    }
  }
}

LogValue log_vnk(const ProcessSpec& spec, long n, long k, long precision_bits) {
  return GibbsWeights(spec, n, precision_bits).log_vnk(n, k);
}

VnkTable VnkTable::build(const ProcessSpec& spec, long n_max, long precision_bits) {
  GibbsWeights w(spec, n_max, precision_bits);
  VnkTable t;
  t.spec = spec;
  t.n_max = n_max;
  t.precision_bits = precision_bits;
  t.log_values.reserve(static_cast<std::size_t>(n_max * (n_max + 1) / 2));
  for (long n = 1; n <= n_max; ++n)
    for (const auto& v : w.log_row(n)) t.log_values.push_back(v.log());
  return t;
}

long double VnkTable::log_vnk(long n, long k) const {
  check_nk(n, k, n_max);
  return log_values[static_cast<std::size_t>((n - 1) * n / 2 + (k - 1))];
}

}  // namespace bnpmix
