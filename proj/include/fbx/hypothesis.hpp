#pragma once

// Neyman-Pearson type-II error beta_delta(p, q): the smallest q-probability
// of a (randomized) test whose p-probability is at least delta.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fbx/feedback_sim.hpp"

namespace fbx {

/// Decide for p when log2(p/q) > log_lr_threshold, with probability
/// `randomization` when it is equal.
struct ThresholdTest {
  double log_lr_threshold = 0.0;  // bits
  double randomization = 0.0;     // in [0, 1]
};

/// Two probability vectors on the same finite alphabet. Each must be
/// nonnegative and sum to 1 within 1e-12 (DomainError otherwise).
class FiniteDistPair {
 public:
  FiniteDistPair(std::vector<double> p, std::vector<double> q);

  const std::vector<double>& p() const { return p_; }
  const std::vector<double>& q() const { return q_; }
  std::size_t size() const { return p_.size(); }

 private:
  std::vector<double> p_;
  std::vector<double> q_;
};

struct FiniteBeta {
  double beta = 0.0;
  ThresholdTest test;
};

/// Exact beta by sorting outcomes on p/q and randomizing on the boundary
/// likelihood-ratio level. delta in [0, 1].
FiniteBeta beta_finite(const FiniteDistPair& pair, double delta);

struct AwgnBeta {
  double log2_beta = 0.0;
  ThresholdTest test;  // randomization is always 0, the LLR law has no atoms
};

/// beta_delta between N(sqrt(P) 1, I_n) and N(0, (1+P) I_n), in log2.
/// Under the first law the LLR is A - P/(2(1+P)) Q with Q noncentral
/// chi-square (n, n/P); under the second it is A - P/2 Q' with Q'
/// noncentral chi-square (n, n(1+P)/P), A = n/2 (ln(1+P) + 1).
/// Throws DomainError unless n >= 1, P > 0 and 0 < delta < 1.
AwgnBeta beta_awgn(std::int64_t n, double power, double delta);

/// (1/xi) (delta - Pr_p[p/q >= xi]), which never exceeds beta_delta.
double beta_lower_bound(const FiniteDistPair& pair, double delta, double xi);

/// log2 of the same bound for the AWGN pair, with xi given in log2.
/// Returns -infinity when the bracket is not positive.
double beta_lower_bound_awgn(std::int64_t n, double power, double delta, double log2_xi);

/// Non-adaptive toy code with maximum-likelihood (minimum distance)
/// decoding.
class ToyCode {
 public:
  /// Codewords +-sqrt(P) 1 (M = 2).
  static ToyCode antipodal(std::int64_t n, double power);
  /// M codewords drawn i.i.d. Gaussian and scaled to norm sqrt(nP).
  static ToyCode spherical(std::uint64_t m, std::int64_t n, double power, std::uint64_t seed);

  std::uint64_t size() const { return m_; }
  std::int64_t length() const { return n_; }
  double power() const { return power_; }
  const std::vector<double>& codeword(std::uint64_t w) const { return codewords_[w]; }
  /// Index of the nearest codeword; ties go to the lowest index.
  std::uint64_t decode(const std::vector<double>& y) const;

 private:
  ToyCode(std::int64_t n, double power, std::vector<std::vector<double>> codewords);
  std::uint64_t m_;
  std::int64_t n_;
  double power_;
  std::vector<std::vector<double>> codewords_;
};

enum class CheckStatus { pass, fail, inconclusive };
std::string_view to_string(CheckStatus status);

struct MetaconverseReport {
  std::uint64_t m = 0;
  std::int64_t n = 0;
  double power = 0.0;
  std::int64_t trials = 0;
  double alpha_hat = 0.0;   // estimated error probability
  double log2_beta = 0.0;   // log2 beta_{1-alpha_hat}(p_{W,What} || p_W s_What)
  double log2_m = 0.0;
  double max_ci_width = 0.0;  // widest 95% interval over the joint-law cells
  bool pass = false;
  CheckStatus status = CheckStatus::fail;
};

/// Estimates the joint law of (W, What) and the decoder's output law under
/// N(0, (1+P) I_n) noise-only inputs, then checks log2 M <= -log2 beta.
/// status is inconclusive when a cell's 95% interval is wider than 0.02.
MetaconverseReport metaconverse_check(const ToyCode& code, std::int64_t trials, std::uint64_t seed,
                                      RunOptions options = {});

}  // namespace fbx
