#pragma once

// Special functions and the moment layer for the per-symbol log-likelihood
// ratio of the AWGN channel measured against the N(0, 1+P) output law.
//
// Information quantities are in bits. Moment generating functions use
// natural exponentials.

#include <cstdint>

namespace fbx {

inline constexpr double kLog2E = 1.44269504088896340735992468100189214;

struct GaussianParams {
  double mean = 0.0;
  double variance = 1.0;
};

/// Density of N(mean, variance) at z. Throws DomainError for variance <= 0.
double phi_pdf(double z, GaussianParams params);

/// Standard normal CDF.
double normal_cdf(double a);
long double normal_cdf(long double a);

/// Inverse of normal_cdf. Throws DomainError unless 0 < p < 1.
double normal_quantile(double p);
long double normal_quantile(long double p);

/// Derivative of normal_quantile, 1 / phi(quantile(p)).
double normal_quantile_derivative(double p);

/// Regularized lower incomplete gamma function P(a, x).
double regularized_gamma_p(double a, double x);
/// log P(a, x), accurate when P underflows.
double log_regularized_gamma_p(double a, double x);

/// CDF of the noncentral chi-square law with `dof` degrees of freedom.
/// Poisson mixture of central terms, truncated once the neglected Poisson
/// mass drops below 1e-15.
double noncentral_chisq_cdf(double x, std::int64_t dof, double noncentrality);

/// Natural log of noncentral_chisq_cdf, usable deep in the lower tail
/// where the CDF itself underflows.
double noncentral_chisq_log_cdf(double x, std::int64_t dof, double noncentrality);

/// Mean, standard deviation and third absolute moment (bits, bits, bits^3)
/// of the per-symbol summand U = (log2 e / (2(1+P))) (-P Z^2 + 2 sqrt(P) Z + P).
struct LlrMoments {
  double mu = 0.0;
  double sigma = 0.0;
  double third_abs = 0.0;
};

/// Throws DomainError for power <= 0. third_abs comes from adaptive
/// Gauss-Kronrod quadrature (absolute tolerance 1e-10) and is checked
/// against the triangle-inequality cube bound before returning.
LlrMoments llr_moments(double power);

/// Upper bound on third_abs^(1/3) from the 3-norm triangle inequality.
double third_moment_root_bound(double power);

/// (1 + 2tP)^(-n/2) exp(2 t^2 n P / (1 + 2tP)), the MGF of
/// sum_k (-P Z_k^2 + 2 sqrt(P) Z_k). Throws DomainError when 1 + 2tP <= 0.
double closed_form_mgf(double t, std::int64_t n, double power);

/// Law of S = sum_{k=1}^n (-P Z_k^2 + 2 sqrt(P) Z_k).
///
/// Completing the square gives S = n - P * Q with Q noncentral chi-square,
/// n degrees of freedom and noncentrality n / P.
struct SumStatisticLaw {
  std::int64_t n = 1;
  double power = 1.0;
  double offset = 1.0;  // a in S = a + b Q
  double scale = -1.0;  // b in S = a + b Q
  std::int64_t dof = 1;
  double noncentrality = 1.0;

  double cdf(double s) const;
  double mean() const;
  double variance() const;
  double mgf(double t) const;
};

SumStatisticLaw sum_statistic_law(std::int64_t n, double power);

}  // namespace fbx
