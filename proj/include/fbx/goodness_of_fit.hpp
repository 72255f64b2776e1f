#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

namespace fbx {

/// Asymptotic one-sample Kolmogorov-Smirnov critical value c(alpha)/sqrt(n)
/// with c(alpha) = sqrt(-ln(alpha/2) / 2).
double ks_critical_value(double alpha, std::size_t n);

/// Asymptotic two-sample critical value c(alpha) sqrt((n + m) / (n m)).
double ks_two_sample_critical_value(double alpha, std::size_t n, std::size_t m);

/// sup_x |F_n(x) - F(x)| for ascending `sorted` samples, evaluated on both
/// sides of every jump of the empirical CDF.
template <class Cdf>
double ks_distance(std::span<const double> sorted, const Cdf& cdf) {
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Two-sample Kolmogorov-Smirnov statistic for ascending inputs.
double ks_two_sample_distance(std::span<const double> a, std::span<const double> b);

}  // namespace fbx
