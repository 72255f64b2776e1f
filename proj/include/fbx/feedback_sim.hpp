#pragma once

// Monte Carlo simulation of feedback codes on the AWGN channel (and on a
// bank of parallel Gaussian channels), with checks of the code-invariant
// law of sum_k lambda(X_k, Y_k).
//
// Trials are independent and each draws from its own Philox stream keyed by
// (seed, trial index, attempt), so a batch is bit-identical for any worker
// count.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "fbx/parallel.hpp"

namespace fbx {

enum class EncoderKind {
  constant_sqrtP,    // x_k = sqrt(P)
  random_spherical,  // per-message codeword uniform on the sphere of radius sqrt(nP)
  adaptive_toy,      // feedback-dependent amplitudes, final symbol restores sum x^2 = nP
  power_violating,   // x_k = sqrt(P/2); negative control, sum x^2 = nP/2
};

std::string_view to_string(EncoderKind kind);
/// Accepts the enum names plus the CLI spellings constant, spherical,
/// adaptive and power-violating. Throws DomainError otherwise.
EncoderKind parse_encoder_kind(std::string_view name);

struct EncoderSpec {
  EncoderKind kind = EncoderKind::constant_sqrtP;
  std::uint64_t message_count = 1;  // M >= 1
  std::uint64_t codebook_seed = 0;  // random_spherical only
  double feedback_gain = 0.5;       // adaptive_toy only, in [0, 1)
};

/// Causal encoder rho_k(W, Y^{k-1}). Instances are cloned per worker and
/// may keep per-trial state set up in start().
class FeedbackEncoder {
 public:
  virtual ~FeedbackEncoder() = default;

  virtual void start(std::uint64_t /*message*/) {}

  /// Symbol for time k (0-based) given y_0..y_{k-1}; `energy_used` is
  /// sum_{j<k} x_j^2, which is itself a function of (message, past outputs).
  virtual double symbol(std::int64_t k, std::uint64_t message, std::span<const double> past_outputs,
                        double energy_used) = 0;

  virtual std::unique_ptr<FeedbackEncoder> clone() const = 0;
};

std::unique_ptr<FeedbackEncoder> make_encoder(const EncoderSpec& spec, std::int64_t n,
                                              double power);

struct SimTrace {
  std::uint64_t seed = 0;     // batch seed
  std::uint64_t trial = 0;    // counter index of the trial
  std::uint32_t attempt = 0;  // > 0 when earlier draws were rejected
  std::int64_t n = 0;
  std::uint64_t message = 0;
  double lambda_sum = 0.0;      // sum_k -P Z_k^2 + 2 X_k Z_k
  double u_sum = 0.0;           // bits; (log2 e / (2(1+P))) (lambda_sum + nP)
  double power_residual = 0.0;  // |sum_k x_k^2 - nP|
};

struct SimBatch {
  EncoderSpec encoder;
  std::int64_t n = 0;
  double power = 0.0;
  std::uint64_t seed = 0;
  std::vector<SimTrace> traces;
  std::vector<double> empirical_cdf;  // ascending lambda_sum values
  std::uint64_t rejected_attempts = 0;
};

struct RunOptions {
  unsigned workers = 1;
  /// Attempts per trial before giving up on an encoder that keeps
  /// overspending its budget.
  std::uint32_t max_attempts = 64;
};

/// Simulates `trials` uses of the code. A trial whose partial energy exceeds
/// nP before the last symbol is redrawn from the next attempt stream and
/// counted in rejected_attempts.
SimBatch run_batch(const EncoderSpec& enc, std::int64_t n, double power, std::int64_t trials,
                   std::uint64_t seed, RunOptions options = {});

/// Same, for a caller-supplied encoder; `record` is stored in the batch.
SimBatch run_batch(const FeedbackEncoder& encoder, const EncoderSpec& record, std::int64_t n,
                   double power, std::int64_t trials, std::uint64_t seed, RunOptions options = {});

/// CSV with columns trial,lambda_sum,u_sum_bits,power_residual. Numbers use
/// shortest round-trip formatting, independent of the locale.
void write_csv(const SimBatch& batch, std::ostream& out);

struct IdentityReport {
  double ks_distance = 0.0;
  double critical_value = 0.0;
  std::size_t trials = 0;
  bool pass = false;
};

/// One-sample KS test of lambda_sum against sum_statistic_law(n, P).
IdentityReport verify_distribution_identity(const SimBatch& batch, double alpha = 0.01);

struct MgfPoint {
  double t = 0.0;
  double empirical = 0.0;
  double closed_form = 0.0;
  double standard_error = 0.0;
  double z_score = 0.0;
};

/// Empirical E[exp(t lambda_sum)] against the closed form. Each t must
/// satisfy t > -1/(4P) so the estimator has finite variance, and the sample
/// exponents must stay below 700 in magnitude; otherwise DomainError.
std::vector<MgfPoint> verify_mgf(const SimBatch& batch, std::span<const double> t_grid);

struct BerryEsseenRow {
  std::int64_t n = 0;
  double sup_dev = 0.0;  // sup_a |F_emp(a) - Phi(a)| of sum U / (sigma sqrt n)
  double bound = 0.0;    // T / (sigma^3 sqrt n)
  double slack = 0.0;    // KS sampling allowance at alpha = 0.01
  bool pass = false;
};

/// Requires trials >= 100 n sigma^6 / T^2 for every n (DomainError
/// otherwise).
std::vector<BerryEsseenRow> berry_esseen_check(double power, std::span<const std::int64_t> n_list,
                                               std::int64_t trials, std::uint64_t seed,
                                               RunOptions options = {});

// Parallel channels --------------------------------------------------------

enum class ParallelEncoderKind {
  waterfill_constant,  // x_{l,k} = sqrt(P_l)
  adaptive,            // feedback-driven split of a feedback-driven per-use budget
  noisiest_channel,    // all power on the largest-variance channel
};

std::string_view to_string(ParallelEncoderKind kind);

struct ParallelSimBatch {
  std::int64_t n = 0;
  ParallelEncoderKind encoder = ParallelEncoderKind::waterfill_constant;
  std::vector<double> u_sums;  // sum_k sum_l lambda(P_l, sigma_l^2, x, y)
  double max_power_residual = 0.0;
};

ParallelSimBatch run_parallel_batch(const ParallelSpec& spec, ParallelEncoderKind kind,
                                    std::int64_t n, std::int64_t trials, std::uint64_t seed,
                                    RunOptions options = {});

struct VarianceEstimate {
  double mean = 0.0;
  double mean_standard_error = 0.0;
  double per_use_variance = 0.0;  // sample Var[sum U] / n
  double standard_error = 0.0;    // of per_use_variance
};

VarianceEstimate estimate_variance(const ParallelSimBatch& batch);

}  // namespace fbx
