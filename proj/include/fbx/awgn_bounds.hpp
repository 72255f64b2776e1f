#pragma once

// Capacity, dispersion and converse bounds on log2 M for the scalar AWGN
// channel with noiseless feedback and a peak power constraint.

#include <cstdint>
#include <optional>
#include <string_view>

namespace fbx {

/// Unit-noise AWGN channel with signal power P > 0.
class ScalarChannel {
 public:
  explicit ScalarChannel(double power);
  double power() const { return power_; }

 private:
  double power_;
};

struct CapacityDispersion {
  double capacity = 0.0;    // bits per channel use
  double dispersion = 0.0;  // bits^2 per channel use
};

/// 1/2 log2(1 + P).
double capacity(const ScalarChannel& ch);
/// P (P + 2) (log2 e)^2 / (2 (P + 1)^2).
double dispersion(const ScalarChannel& ch);
CapacityDispersion capacity_dispersion(const ScalarChannel& ch);

enum class BoundKind { finite_n_converse, theorem1_kappa_form, normal_approximation };

std::string_view to_string(BoundKind kind);

/// Constants behind a converse evaluation. kappa_bar bounds the
/// Berry-Esseen remainder for every n >= n_min, the smallest blocklength
/// at which eps + 2T/(sigma^3 sqrt(n)) < 1.
struct BoundConstants {
  double sigma = 0.0;
  double third_abs = 0.0;  // T
  double kappa_bar = 0.0;
  double kappa = 0.0;
  std::int64_t n_min = 0;
};

struct BoundReport {
  std::int64_t n = 0;
  double epsilon = 0.0;
  BoundKind kind = BoundKind::finite_n_converse;
  double log_m_bound = 0.0;                 // bits
  std::optional<double> threshold_log_xi;   // bits, converse kinds only
  std::optional<BoundConstants> constants;  // converse kinds only
};

/// Berry-Esseen constants for (P, eps), independent of n.
BoundConstants converse_constants(const ScalarChannel& ch, double epsilon);

/// Non-asymptotic converse: an upper bound on log2 M*_fb(n-1, eps, P),
///   (n/2) log2(1+P) + sigma sqrt(n) Phi^-1(eps + 2T/(sigma^3 sqrt n))
///     - log2(T / (sigma^3 sqrt n)).
/// Throws DomainError when eps + 2T/(sigma^3 sqrt n) >= 1.
BoundReport finite_n_converse(const ScalarChannel& ch, std::int64_t n, double epsilon);

/// n C + sqrt(n V) Phi^-1(eps) + 1/2 log2 n + kappa.
BoundReport theorem1_kappa_form(const ScalarChannel& ch, std::int64_t n, double epsilon);

/// Reference curve n C + sqrt(n V) Phi^-1(eps) + 1/2 log2 n with the O(1)
/// term set to zero. Not a bound.
BoundReport normal_approximation(const ScalarChannel& ch, std::int64_t n, double epsilon);

}  // namespace fbx
