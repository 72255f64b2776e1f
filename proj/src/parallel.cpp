#include "fbx/parallel.hpp"

#include <algorithm>
#include <cmath>

#include "fbx/awgn_bounds.hpp"
#include "fbx/error.hpp"
#include "fbx/scalar_stats.hpp"

namespace fbx {
namespace {

double single_capacity(double snr) { return snr > 0.0 ? capacity(ScalarChannel(snr)) : 0.0; }
double single_dispersion(double snr) { return snr > 0.0 ? dispersion(ScalarChannel(snr)) : 0.0; }

}  // namespace

ParallelSpec::ParallelSpec(std::vector<double> noise_variances, double total_power)
    : noise_variances_(std::move(noise_variances)), total_power_(total_power) {
  if (noise_variances_.empty()) throw DomainError("parallel channel needs at least one channel");
  for (double v : noise_variances_) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError("noise variances must be positive and finite");
    }
  }
  if (!(total_power > 0.0) || !std::isfinite(total_power)) {
    throw DomainError("total power P must be positive and finite");
  }
}

PowerAllocation waterfill(const ParallelSpec& spec) {
  std::vector<double> sorted = spec.noise_variances();
  std::sort(sorted.begin(), sorted.end());
  const double total = spec.total_power();
  const auto excess = [&](double level) {
    double sum = 0.0;
    for (double v : sorted) sum += std::max(0.0, level - v);
    return sum - total;
  };

  const double tol = 1e-12 * std::max(1.0, total);
  double lo = sorted.front();
  double hi = sorted.back() + total;
  double best = hi;
  double best_residual = std::abs(excess(hi));
  for (int iter = 0; iter < 200 && best_residual >= tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double r = excess(mid);
    if (std::abs(r) < best_residual) {
      best = mid;
      best_residual = std::abs(r);
    }
    (r < 0.0 ? lo : hi) = mid;
  }

  // Polish: with the active set fixed by the bracket, the level is exact.
  double acc = 0.0;
  std::size_t active = 0;
  for (double v : sorted) {
    if (v >= best) break;
    acc += v;
    ++active;
  }
  if (active > 0) {
    const double exact = (total + acc) / static_cast<double>(active);
    const bool same_set = exact > sorted[active - 1] && (active == sorted.size() || exact <= sorted[active]);
    if (same_set && std::abs(excess(exact)) <= best_residual) best = exact;
  }

  PowerAllocation alloc;
  alloc.water_level = best;
  alloc.powers.reserve(spec.size());
  for (double v : spec.noise_variances()) alloc.powers.push_back(std::max(0.0, best - v));
  return alloc;
}

double capacity_parallel(const ParallelSpec& spec, const PowerAllocation& alloc) {
  double sum = 0.0;
  for (std::size_t l = 0; l < spec.size(); ++l) {
    sum += single_capacity(alloc.powers[l] / spec.noise_variances()[l]);
  }
  return sum;
}

double capacity_parallel(const ParallelSpec& spec) {
  return capacity_parallel(spec, waterfill(spec));
}

double dispersion_parallel(const ParallelSpec& spec, const PowerAllocation& alloc) {
  double sum = 0.0;
  for (std::size_t l = 0; l < spec.size(); ++l) {
    sum += single_dispersion(alloc.powers[l] / spec.noise_variances()[l]);
  }
  return sum;
}

double dispersion_parallel(const ParallelSpec& spec) {
  return dispersion_parallel(spec, waterfill(spec));
}

VarianceEnvelope variance_envelope(const ParallelSpec& spec, const PowerAllocation& alloc) {
  const auto [min_it, max_it] =
      std::minmax_element(spec.noise_variances().begin(), spec.noise_variances().end());
  double sum_sq = 0.0;
  for (double p : alloc.powers) sum_sq += p * p;
  const double total = spec.total_power();
  return {4.0 * *min_it * total, 2.0 * sum_sq + 4.0 * *max_it * total};
}

VarianceEnvelope variance_envelope(const ParallelSpec& spec) {
  return variance_envelope(spec, waterfill(spec));
}

ParallelBoundReport theorem2_bound(const ParallelSpec& spec, std::int64_t n, double epsilon) {
  if (n < 2) throw DomainError("theorem2_bound: n must be >= 2");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0,1)");

  const PowerAllocation alloc = waterfill(spec);
  const VarianceEnvelope env = variance_envelope(spec, alloc);
  const double c_l = capacity_parallel(spec, alloc);
  const auto nd = static_cast<double>(n);

  // Chebyshev: Pr{sum U >= sqrt(2 Var / (1 - eps))} <= (1 - eps) / 2.
  const double spread = kLog2E / (2.0 * alloc.water_level) *
                        std::sqrt(2.0 * env.kappa_bar / (1.0 - epsilon));
  const double penalty = -std::log2(0.5 * (1.0 - epsilon));

  ParallelBoundReport r;
  r.n = n;
  r.epsilon = epsilon;
  r.log_m_bound = nd * c_l + spread * std::sqrt(nd) + penalty;
  r.water_level = alloc.water_level;
  r.powers = alloc.powers;
  r.constants.kappa_tilde = env.kappa_tilde;
  r.constants.kappa_bar = env.kappa_bar;
  r.constants.kappa = 2.0 * spread + penalty + c_l;
  r.constants.capacity = c_l;
  r.constants.dispersion = dispersion_parallel(spec, alloc);
  const double shifted = (nd - 1.0) * c_l + r.constants.kappa * std::sqrt(nd - 1.0);
  r.kappa_form_holds = r.log_m_bound <= shifted * (1.0 + 1e-12);
  return r;
}

StrongConverseReport strong_converse_check(const ParallelSpec& spec,
                                           const std::vector<double>& epsilons,
                                           std::int64_t n) {
  if (epsilons.empty()) throw DomainError("strong_converse_check: no epsilon values given");
  StrongConverseReport report;
  report.n = n;
  report.capacity = capacity_parallel(spec);
  for (double eps : epsilons) {
    const ParallelBoundReport b = theorem2_bound(spec, n, eps);
    StrongConverseRow row;
    row.epsilon = eps;
    row.rate_bound = b.log_m_bound / static_cast<double>(n);
    row.gap = std::abs(row.rate_bound - report.capacity);
    row.kappa = b.constants.kappa;
    report.kappa_max = std::max(report.kappa_max, row.kappa);
    report.max_gap = std::max(report.max_gap, row.gap);
    report.rows.push_back(row);
  }
  report.pass = report.max_gap <= report.kappa_max / std::sqrt(static_cast<double>(n));
  return report;
}

}  // namespace fbx
