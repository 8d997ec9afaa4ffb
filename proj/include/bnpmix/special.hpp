#pragma once

#include <span>
#include <vector>

namespace bnpmix {

/// log of the ascending factorial (x)_n = x(x+1)...(x+n-1); (x)_0 = 1.
/// Throws DomainError for x <= 0.
double log_pochhammer(double x, long n);

/// log n!
double log_factorial(long n);

/// log of the binomial coefficient C(n, k); -inf when k is outside [0, n].
double log_binomial(long n, long k);

/// Stable log(sum(exp(v))); -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> v);

/// log(exp(a) + exp(b)).
double log_add_exp(double a, double b);

/// Log-space convolution: out[m] = log sum_{i+j=m} exp(a[i] + b[j]).
std::vector<double> log_convolve(std::span<const double> a, std::span<const double> b);

}  // namespace bnpmix
