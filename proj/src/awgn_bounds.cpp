#include "fbx/awgn_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fbx/error.hpp"
#include "fbx/scalar_stats.hpp"

namespace fbx {
namespace {

void check_inputs(std::int64_t n, double epsilon) {
  if (n < 1) throw DomainError("blocklength n must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0,1)");
}

// log2(1 + P) in extended precision; log1p keeps small P accurate.
long double log2_one_plus(double power) {
  if (power < 0.25) {
    return std::log1p(static_cast<long double>(power)) / std::numbers::ln2_v<long double>;
  }
  return std::log2(1.0L + power);
}

// n C + sqrt(n V) Phi^-1(eps) + 1/2 log2 n, shared by the kappa form and the
// normal approximation.
long double second_order_expansion(const ScalarChannel& ch, std::int64_t n, double epsilon) {
  const auto nl = static_cast<long double>(n);
  const long double v = dispersion(ch);
  return nl * 0.5L * log2_one_plus(ch.power()) +
         std::sqrt(nl * v) * normal_quantile(static_cast<long double>(epsilon)) +
         0.5L * std::log2(nl);
}

}  // namespace

ScalarChannel::ScalarChannel(double power) : power_(power) {
  if (!(power > 0.0) || !std::isfinite(power)) {
    throw DomainError("channel power P must be a positive finite number");
  }
}

double capacity(const ScalarChannel& ch) {
  return static_cast<double>(0.5L * log2_one_plus(ch.power()));
}

double dispersion(const ScalarChannel& ch) {
  const double p = ch.power();
  return p * (p + 2.0) * kLog2E * kLog2E / (2.0 * (p + 1.0) * (p + 1.0));
}

CapacityDispersion capacity_dispersion(const ScalarChannel& ch) {
  return {capacity(ch), dispersion(ch)};
}

std::string_view to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::finite_n_converse: return "finite_n_converse";
    case BoundKind::theorem1_kappa_form: return "theorem1_kappa_form";
    case BoundKind::normal_approximation: return "normal_approximation";
  }
  return "unknown";
}

BoundConstants converse_constants(const ScalarChannel& ch, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0,1)");
  const LlrMoments m = llr_moments(ch.power());
  const double s3 = m.sigma * m.sigma * m.sigma;
  const double slack = 2.0 * m.third_abs / s3;  // Berry-Esseen shift at n = 1

  const auto admissible = [&](std::int64_t n) {
    return epsilon + slack / std::sqrt(static_cast<double>(n)) < 1.0;
  };
  const double guess = std::floor(std::pow(slack / (1.0 - epsilon), 2));
  auto n_min = std::max<std::int64_t>(1, static_cast<std::int64_t>(guess));
  while (!admissible(n_min)) ++n_min;
  while (n_min > 1 && admissible(n_min - 1)) --n_min;

  // (Phi^-1)' is convex on (0,1), so its supremum over the Taylor interval
  // [eps, eps + slack / sqrt(n_min)] sits at an endpoint.
  const double upper = epsilon + slack / std::sqrt(static_cast<double>(n_min));
  const double sup_derivative =
      std::max(normal_quantile_derivative(epsilon), normal_quantile_derivative(upper));

  BoundConstants c;
  c.sigma = m.sigma;
  c.third_abs = m.third_abs;
  c.n_min = n_min;
  c.kappa_bar = 2.0 * m.third_abs / (m.sigma * m.sigma) * sup_derivative -
                std::log2(m.third_abs / s3);
  // Shifting the blocklength from n to n - 1 costs C(P) for the linear term,
  // at most 1/2 bit for the log term, and sigma Phi^-1(eps) only when that
  // coefficient is positive.
  c.kappa = c.kappa_bar + capacity(ch) + std::max(0.0, m.sigma * normal_quantile(epsilon)) + 0.5;
  return c;
}

BoundReport finite_n_converse(const ScalarChannel& ch, std::int64_t n, double epsilon) {
  check_inputs(n, epsilon);
  const BoundConstants c = converse_constants(ch, epsilon);
  const auto nl = static_cast<long double>(n);
  const long double s3 = static_cast<long double>(c.sigma) * c.sigma * c.sigma;
  const long double be = c.third_abs / (s3 * std::sqrt(nl));
  const long double arg = epsilon + 2.0L * be;
  if (n < c.n_min || !(arg < 1.0L)) {
    throw DomainError("blocklength too small for Berry-Esseen slack: eps + 2T/(sigma^3 sqrt(n)) >= 1");
  }
  const long double threshold =
      nl * 0.5L * log2_one_plus(ch.power()) + c.sigma * std::sqrt(nl) * normal_quantile(arg);

  BoundReport r;
  r.n = n;
  r.epsilon = epsilon;
  r.kind = BoundKind::finite_n_converse;
  r.threshold_log_xi = static_cast<double>(threshold);
  r.log_m_bound = static_cast<double>(threshold - std::log2(be));
  r.constants = c;
  return r;
}

BoundReport theorem1_kappa_form(const ScalarChannel& ch, std::int64_t n, double epsilon) {
  check_inputs(n, epsilon);
  const BoundConstants c = converse_constants(ch, epsilon);
  BoundReport r;
  r.n = n;
  r.epsilon = epsilon;
  r.kind = BoundKind::theorem1_kappa_form;
  r.log_m_bound = static_cast<double>(second_order_expansion(ch, n, epsilon) + c.kappa);
  if (n >= c.n_min) r.threshold_log_xi = finite_n_converse(ch, n, epsilon).threshold_log_xi;
  r.constants = c;
  return r;
}

BoundReport normal_approximation(const ScalarChannel& ch, std::int64_t n, double epsilon) {
  check_inputs(n, epsilon);
  BoundReport r;
  r.n = n;
  r.epsilon = epsilon;
  r.kind = BoundKind::normal_approximation;
  r.log_m_bound = static_cast<double>(second_order_expansion(ch, n, epsilon));
  return r;
}

}  // namespace fbx
