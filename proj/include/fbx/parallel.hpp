#pragma once

// Water-filling and the sqrt(n)-order converse for L parallel Gaussian
// channels with feedback under a total peak power constraint.

#include <cstdint>
#include <vector>

namespace fbx {

/// L >= 1 independent Gaussian channels with noise variances sigma_l^2 > 0
/// sharing a total power budget P > 0.
class ParallelSpec {
 public:
  ParallelSpec(std::vector<double> noise_variances, double total_power);

  const std::vector<double>& noise_variances() const { return noise_variances_; }
  double total_power() const { return total_power_; }
  std::size_t size() const { return noise_variances_.size(); }

 private:
  std::vector<double> noise_variances_;
  double total_power_;
};

struct PowerAllocation {
  double water_level = 0.0;   // Lambda
  std::vector<double> powers;  // P_l = max(0, Lambda - sigma_l^2)
};

/// Bisection on the water level until |sum_l P_l - P| < 1e-12 max(1, P).
PowerAllocation waterfill(const ParallelSpec& spec);

/// C_L(P) = sum_l 1/2 log2(1 + P_l / sigma_l^2), bits per channel use.
double capacity_parallel(const ParallelSpec& spec);
double capacity_parallel(const ParallelSpec& spec, const PowerAllocation& alloc);

/// V_L(P) = sum_l V(P_l / sigma_l^2), bits^2 per channel use.
double dispersion_parallel(const ParallelSpec& spec);
double dispersion_parallel(const ParallelSpec& spec, const PowerAllocation& alloc);

/// Per-use bracket (kappa_tilde, kappa_bar] on Var[sum_k U_k] / n for any
/// feedback code meeting the total power with equality.
struct VarianceEnvelope {
  double kappa_tilde = 0.0;  // 4 min_l sigma_l^2 P
  double kappa_bar = 0.0;    // 2 sum_l P_l^2 + 4 max_l sigma_l^2 P
};

VarianceEnvelope variance_envelope(const ParallelSpec& spec);
VarianceEnvelope variance_envelope(const ParallelSpec& spec, const PowerAllocation& alloc);

struct ParallelBoundConstants {
  double kappa_tilde = 0.0;
  double kappa_bar = 0.0;
  double kappa = 0.0;
  double capacity = 0.0;    // C_L
  double dispersion = 0.0;  // V_L
};

struct ParallelBoundReport {
  std::int64_t n = 0;
  double epsilon = 0.0;
  double log_m_bound = 0.0;  // bits; bounds log2 M*_fb(n - 1, eps, P, L)
  double water_level = 0.0;
  std::vector<double> powers;
  ParallelBoundConstants constants;
  /// log_m_bound <= (n-1) C_L + kappa sqrt(n-1), the kappa-form statement.
  bool kappa_form_holds = false;
};

/// Chebyshev-based converse with Var[sum U_k] replaced by its envelope n
/// kappa_bar:
///   n C_L + (log2 e / (2 Lambda)) sqrt(2 n kappa_bar / (1 - eps))
///     - log2((1 - eps) / 2).
/// Throws DomainError for n < 2 or eps outside (0,1).
ParallelBoundReport theorem2_bound(const ParallelSpec& spec, std::int64_t n, double epsilon);

struct StrongConverseRow {
  double epsilon = 0.0;
  double rate_bound = 0.0;  // theorem2_bound(n) / n
  double gap = 0.0;         // |rate_bound - C_L|
  double kappa = 0.0;
};

struct StrongConverseReport {
  std::int64_t n = 0;
  double capacity = 0.0;
  double kappa_max = 0.0;
  double max_gap = 0.0;
  std::vector<StrongConverseRow> rows;
  bool pass = false;  // max_gap <= kappa_max / sqrt(n)
};

/// Evaluates the converse rate for each eps at blocklength n and checks that
/// all of them sit within kappa_max / sqrt(n) of C_L.
StrongConverseReport strong_converse_check(const ParallelSpec& spec,
                                           const std::vector<double>& epsilons,
                                           std::int64_t n = 1'000'000);

}  // namespace fbx
