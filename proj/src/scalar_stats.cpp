#include "fbx/scalar_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fbx/error.hpp"
#include "quadrature.hpp"

namespace fbx {
namespace {

constexpr int kMaxGammaIterations = 1'000'000;

template <class T>
T cdf_impl(T a) {
  return T(0.5) * std::erfc(-a / std::numbers::sqrt2_v<T>);
}

// Acklam's rational approximation for p <= 0.5, then Halley steps on the
// lower-tail CDF, which erfc evaluates without cancellation.
template <class T>
T lower_quantile(T p) {
  constexpr T a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                     1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  constexpr T b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                     6.680131188771972e+01, -1.328068155288572e+01};
  constexpr T c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                     -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  constexpr T d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                     3.754408661907416e+00};
  T x;
  if (p < T(0.02425)) {
    const T q = std::sqrt(T(-2) * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else {
    const T q = p - T(0.5);
    const T r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  }
  const T sqrt_two_pi = std::sqrt(T(2) * std::numbers::pi_v<T>);
  for (int step = 0; step < 2; ++step) {
    const T e = cdf_impl(x) - p;
    const T u = e * sqrt_two_pi * std::exp(x * x / 2);
    x = x - u / (1 + x * u / 2);
  }
  return x;
}

template <class T>
T quantile_impl(T p) {
  if (!(p > 0 && p < 1)) {
    throw DomainError("normal_quantile: probability must lie in (0,1), got " +
                      std::to_string(static_cast<double>(p)));
  }
  if (p == T(0.5)) return 0;
  // 1 - p is exact for p >= 0.5.
  return p < T(0.5) ? lower_quantile(p) : -lower_quantile(T(1) - p);
}

// log P(a, x) by the power series; valid for any x > 0 but fast only for
// x < a + 1.
double log_gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int m = 1; m < kMaxGammaIterations; ++m) {
    term *= x / (a + m);
    sum += term;
    if (term < sum * 1e-17) {
      return std::log(sum) + a * std::log(x) - x - std::lgamma(a);
    }
  }
  throw std::runtime_error("incomplete gamma series did not converge");
}

// log Q(a, x) by Lentz's continued fraction; use for x >= a + 1.
double log_gamma_q_fraction(double a, double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxGammaIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) {
      return std::log(h) + a * std::log(x) - x - std::lgamma(a);
    }
  }
  throw std::runtime_error("incomplete gamma continued fraction did not converge");
}

void check_chisq_args(std::int64_t dof, double noncentrality) {
  if (dof < 1) throw DomainError("noncentral_chisq: dof must be >= 1");
  if (!(noncentrality >= 0.0)) {
    throw DomainError("noncentral_chisq: noncentrality must be >= 0");
  }
}

}  // namespace

double phi_pdf(double z, GaussianParams params) {
  if (!(params.variance > 0.0)) throw DomainError("phi_pdf: variance must be positive");
  const double d = z - params.mean;
  return std::exp(-d * d / (2.0 * params.variance)) /
         std::sqrt(2.0 * std::numbers::pi * params.variance);
}

double normal_cdf(double a) { return cdf_impl(a); }
long double normal_cdf(long double a) { return cdf_impl(a); }
double normal_quantile(double p) { return quantile_impl(p); }
long double normal_quantile(long double p) { return quantile_impl(p); }

double normal_quantile_derivative(double p) {
  const double x = normal_quantile(p);
  return 1.0 / phi_pdf(x, {});
}

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw DomainError("regularized_gamma_p: a must be positive");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return std::exp(log_gamma_p_series(a, x));
  return -std::expm1(log_gamma_q_fraction(a, x));
}

double log_regularized_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw DomainError("log_regularized_gamma_p: a must be positive");
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return log_gamma_p_series(a, x);
  return std::log1p(-std::exp(log_gamma_q_fraction(a, x)));
}

double noncentral_chisq_cdf(double x, std::int64_t dof, double noncentrality) {
  check_chisq_args(dof, noncentrality);
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double half_x = 0.5 * x;
  const double a0 = 0.5 * static_cast<double>(dof);
  if (noncentrality == 0.0) return regularized_gamma_p(a0, half_x);

  constexpr double kTailTol = 1e-15;
  const double half_nc = 0.5 * noncentrality;
  const double log_half_nc = std::log(half_nc);
  const double log_half_x = std::log(half_x);
  const auto weight = [&](double j) {
    return std::exp(-half_nc + j * log_half_nc - std::lgamma(j + 1.0));
  };
  // P(a, x) - P(a + 1, x)
  const auto step = [&](double a) {
    return std::exp(a * log_half_x - half_x - std::lgamma(a + 1.0));
  };

  const double j_mode = std::floor(half_nc);
  const double p_mode = regularized_gamma_p(a0 + j_mode, half_x);
  double sum = weight(j_mode) * p_mode;

  double p = p_mode;
  for (double j = j_mode - 1.0; j >= 0.0; j -= 1.0) {
    p = std::min(1.0, p + step(a0 + j));
    const double w = weight(j);
    sum += w * p;
    const double ratio = j / half_nc;
    if (ratio < 1.0 && w * ratio / (1.0 - ratio) < kTailTol) break;
  }

  p = p_mode;
  for (double j = j_mode + 1.0;; j += 1.0) {
    p = std::max(0.0, p - step(a0 + j - 1.0));
    if (p == 0.0) break;
    const double w = weight(j);
    sum += w * p;
    const double ratio = half_nc / (j + 1.0);
    if (ratio < 1.0 && p * w * ratio / (1.0 - ratio) < kTailTol) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double noncentral_chisq_log_cdf(double x, std::int64_t dof, double noncentrality) {
  check_chisq_args(dof, noncentrality);
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  if (std::isinf(x)) return 0.0;
  const double half_x = 0.5 * x;
  const double a0 = 0.5 * static_cast<double>(dof);
  if (noncentrality == 0.0) return log_regularized_gamma_p(a0, half_x);

  const double half_nc = 0.5 * noncentrality;
  const double log_half_nc = std::log(half_nc);
  const auto term = [&](std::int64_t j) {
    const auto jd = static_cast<double>(j);
    return -half_nc + jd * log_half_nc - std::lgamma(jd + 1.0) +
           log_regularized_gamma_p(a0 + jd, half_x);
  };

  // Poisson weights and P(a + j, x) are both log-concave in j, so the
  // summand is unimodal with its peak at or below the Poisson mode.
  std::int64_t lo = 0;
  std::int64_t hi = static_cast<std::int64_t>(std::ceil(half_nc));
  while (hi - lo > 2) {
    const std::int64_t m1 = lo + (hi - lo) / 3;
    const std::int64_t m2 = hi - (hi - lo) / 3;
    if (term(m1) < term(m2)) {
      lo = m1 + 1;
    } else {
      hi = m2 - 1;
    }
  }
  std::int64_t peak = lo;
  double peak_value = term(lo);
  for (std::int64_t j = lo + 1; j <= hi; ++j) {
    const double v = term(j);
    if (v > peak_value) {
      peak_value = v;
      peak = j;
    }
  }

  constexpr double kDrop = 60.0;  // e^-60 relative to the peak is negligible
  double acc = 1.0;               // exp(term(peak) - peak_value)
  for (std::int64_t j = peak - 1; j >= 0; --j) {
    const double v = term(j) - peak_value;
    acc += std::exp(v);
    if (v < -kDrop) break;
  }
  for (std::int64_t j = peak + 1;; ++j) {
    const double v = term(j) - peak_value;
    acc += std::exp(v);
    if (v < -kDrop) break;
  }
  return std::min(0.0, peak_value + std::log(acc));
}

double third_moment_root_bound(double power) {
  const double scale = kLog2E / (2.0 * (1.0 + power));
  return scale * (std::cbrt(15.0) * power +
                  2.0 * std::cbrt(2.0 * std::sqrt(2.0 / std::numbers::pi)) * std::sqrt(power) +
                  power);
}

LlrMoments llr_moments(double power) {
  if (!(power > 0.0)) throw DomainError("llr_moments: power must be positive");
  const double scale = kLog2E / (2.0 * (1.0 + power));
  const double root_p = std::sqrt(power);
  const auto integrand = [&](double z) {
    const double u = scale * (-power * z * z + 2.0 * root_p * z + power);
    return std::abs(u * u * u) * std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  };

  // |u|^3 has kinks at the two roots of the quadratic; integrate the smooth
  // pieces separately. The standard normal weight is < 1e-300 beyond |z|=38.
  const double disc = std::sqrt(1.0 + power);
  const double r0 = (1.0 - disc) / root_p;
  const double r1 = (1.0 + disc) / root_p;
  constexpr double kEdge = 38.0;
  constexpr double kTol = 1e-10;
  double third = 0.0;
  const double knots[] = {-kEdge, std::max(-kEdge, r0), std::min(kEdge, r1), kEdge};
  for (int i = 0; i < 3; ++i) {
    if (knots[i + 1] > knots[i]) {
      third += detail::integrate_adaptive(integrand, knots[i], knots[i + 1], kTol / 3.0).value;
    }
  }

  LlrMoments m;
  m.mu = 0.0;
  m.sigma = std::sqrt(power * (power + 2.0) * kLog2E * kLog2E /
                      (2.0 * (1.0 + power) * (1.0 + power)));
  m.third_abs = third;
  const double bound = third_moment_root_bound(power);
  if (std::cbrt(m.third_abs) > bound * (1.0 + 1e-9)) {
    throw std::logic_error("llr_moments: third absolute moment exceeds its analytic bound");
  }
  return m;
}

double closed_form_mgf(double t, std::int64_t n, double power) {
  if (n < 1) throw DomainError("closed_form_mgf: n must be >= 1");
  if (!(power > 0.0)) throw DomainError("closed_form_mgf: power must be positive");
  const double base = 1.0 + 2.0 * t * power;
  if (!(base > 0.0)) throw DomainError("MGF diverges: requires 1 + 2tP > 0");
  const auto nd = static_cast<double>(n);
  return std::exp(-0.5 * nd * std::log1p(2.0 * t * power) + 2.0 * t * t * nd * power / base);
}

SumStatisticLaw sum_statistic_law(std::int64_t n, double power) {
  if (n < 1) throw DomainError("sum_statistic_law: n must be >= 1");
  if (!(power > 0.0)) throw DomainError("sum_statistic_law: power must be positive");
  SumStatisticLaw law;
  law.n = n;
  law.power = power;
  law.offset = static_cast<double>(n);
  law.scale = -power;
  law.dof = n;
  law.noncentrality = static_cast<double>(n) / power;
  return law;
}

double SumStatisticLaw::cdf(double s) const {
  // S <= s  <=>  Q >= (offset - s) / power
  const double q = (offset - s) / power;
  if (q <= 0.0) return 1.0;
  return 1.0 - noncentral_chisq_cdf(q, dof, noncentrality);
}

double SumStatisticLaw::mean() const {
  return offset + scale * (static_cast<double>(dof) + noncentrality);
}

double SumStatisticLaw::variance() const {
  return scale * scale * 2.0 * (static_cast<double>(dof) + 2.0 * noncentrality);
}

double SumStatisticLaw::mgf(double t) const { return closed_form_mgf(t, n, power); }

}  // namespace fbx
