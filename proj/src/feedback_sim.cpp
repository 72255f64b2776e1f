#include "fbx/feedback_sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "fbx/error.hpp"
#include "fbx/goodness_of_fit.hpp"
#include "fbx/philox.hpp"
#include "fbx/scalar_stats.hpp"
#include "parallel_for.hpp"

namespace fbx {
namespace {

constexpr std::uint32_t kCodebookLane = 0xC0DEu;

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class ConstantEncoder final : public FeedbackEncoder {
 public:
  explicit ConstantEncoder(double amplitude) : amplitude_(amplitude) {}
  double symbol(std::int64_t, std::uint64_t, std::span<const double>, double) override {
    return amplitude_;
  }
  std::unique_ptr<FeedbackEncoder> clone() const override {
    return std::make_unique<ConstantEncoder>(*this);
  }

 private:
  double amplitude_;
};

class SphericalEncoder final : public FeedbackEncoder {
 public:
  SphericalEncoder(std::int64_t n, double power, std::uint64_t codebook_seed)
      : n_(n), power_(power), codebook_seed_(codebook_seed) {}

  void start(std::uint64_t message) override {
    codeword_.resize(static_cast<std::size_t>(n_));
    CounterStream stream(codebook_seed_, message, kCodebookLane);
    double norm2 = 0.0;
    for (auto& x : codeword_) {
      x = stream.next_normal();
      norm2 += x * x;
    }
    const double scale = std::sqrt(static_cast<double>(n_) * power_ / norm2);
    for (auto& x : codeword_) x *= scale;
  }
  double symbol(std::int64_t k, std::uint64_t, std::span<const double>, double) override {
    return codeword_[static_cast<std::size_t>(k)];
  }
  std::unique_ptr<FeedbackEncoder> clone() const override {
    return std::make_unique<SphericalEncoder>(*this);
  }

 private:
  std::int64_t n_;
  double power_;
  std::uint64_t codebook_seed_;
  std::vector<double> codeword_;
};

// x_k = s_k(w) sqrt(P) (1 + gain tanh(y_{k-1})), clipped to the remaining
// budget; the last symbol spends whatever budget is left so that
// sum x_k^2 = nP holds on every path.
class AdaptiveToyEncoder final : public FeedbackEncoder {
 public:
  AdaptiveToyEncoder(std::int64_t n, double power, double gain)
      : n_(n), power_(power), gain_(gain) {}

  double symbol(std::int64_t k, std::uint64_t message, std::span<const double> past,
                double energy_used) override {
    const double sign = (mix64(message * 0x100000001B3ull + static_cast<std::uint64_t>(k)) & 1u)
                            ? 1.0
                            : -1.0;
    const double remaining = std::max(0.0, static_cast<double>(n_) * power_ - energy_used);
    if (k == n_ - 1) return sign * std::sqrt(remaining);
    const double feedback = past.empty() ? 0.0 : std::tanh(past.back());
    const double amplitude = std::sqrt(power_) * (1.0 + gain_ * feedback);
    return sign * std::min(amplitude, std::sqrt(remaining));
  }
  std::unique_ptr<FeedbackEncoder> clone() const override {
    return std::make_unique<AdaptiveToyEncoder>(*this);
  }

 private:
  std::int64_t n_;
  double power_;
  double gain_;
};

void check_sim_args(std::int64_t n, double power, std::int64_t trials) {
  if (n < 1) throw DomainError("simulation: n must be >= 1");
  if (!(power > 0.0) || !std::isfinite(power)) throw DomainError("simulation: power must be positive");
  if (trials < 1) throw DomainError("simulation: trials must be >= 1");
}

void append_number(std::string& line, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  line.append(buf, res.ptr);
}

template <class T>
void append_integer(std::string& line, T v) {
  char buf[24];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  line.append(buf, res.ptr);
}

struct Moments {
  double mean = 0.0;
  double m2 = 0.0;  // central second moment
  double m4 = 0.0;  // central fourth moment
};

Moments central_moments(std::span<const double> xs) {
  long double sum = 0.0L;
  for (double x : xs) sum += x;
  const auto count = static_cast<long double>(xs.size());
  const double mean = static_cast<double>(sum / count);
  long double s2 = 0.0L;
  long double s4 = 0.0L;
  for (double x : xs) {
    const long double d = x - mean;
    s2 += d * d;
    s4 += d * d * d * d;
  }
  return {mean, static_cast<double>(s2 / count), static_cast<double>(s4 / count)};
}

}  // namespace

std::string_view to_string(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::constant_sqrtP: return "constant_sqrtP";
    case EncoderKind::random_spherical: return "random_spherical";
    case EncoderKind::adaptive_toy: return "adaptive_toy";
    case EncoderKind::power_violating: return "power_violating";
  }
  return "unknown";
}

EncoderKind parse_encoder_kind(std::string_view name) {
  if (name == "constant" || name == "constant_sqrtP") return EncoderKind::constant_sqrtP;
  if (name == "spherical" || name == "random_spherical") return EncoderKind::random_spherical;
  if (name == "adaptive" || name == "adaptive_toy") return EncoderKind::adaptive_toy;
  if (name == "power-violating" || name == "power_violating") return EncoderKind::power_violating;
  throw DomainError("unknown encoder kind: " + std::string(name));
}

std::string_view to_string(ParallelEncoderKind kind) {
  switch (kind) {
    case ParallelEncoderKind::waterfill_constant: return "waterfill_constant";
    case ParallelEncoderKind::adaptive: return "adaptive";
    case ParallelEncoderKind::noisiest_channel: return "noisiest_channel";
  }
  return "unknown";
}

std::unique_ptr<FeedbackEncoder> make_encoder(const EncoderSpec& spec, std::int64_t n,
                                              double power) {
  if (spec.message_count < 1) throw DomainError("encoder: message_count must be >= 1");
  switch (spec.kind) {
    case EncoderKind::constant_sqrtP:
      return std::make_unique<ConstantEncoder>(std::sqrt(power));
    case EncoderKind::random_spherical:
      return std::make_unique<SphericalEncoder>(n, power, spec.codebook_seed);
    case EncoderKind::adaptive_toy:
      if (!(spec.feedback_gain >= 0.0 && spec.feedback_gain < 1.0)) {
        throw DomainError("adaptive encoder: feedback_gain must lie in [0,1)");
      }
      return std::make_unique<AdaptiveToyEncoder>(n, power, spec.feedback_gain);
    case EncoderKind::power_violating:
      return std::make_unique<ConstantEncoder>(std::sqrt(0.5 * power));
  }
  throw DomainError("encoder: unknown kind");
}

SimBatch run_batch(const EncoderSpec& enc, std::int64_t n, double power, std::int64_t trials,
                   std::uint64_t seed, RunOptions options) {
  check_sim_args(n, power, trials);
  const auto encoder = make_encoder(enc, n, power);
  return run_batch(*encoder, enc, n, power, trials, seed, options);
}

SimBatch run_batch(const FeedbackEncoder& encoder, const EncoderSpec& record, std::int64_t n,
                   double power, std::int64_t trials, std::uint64_t seed, RunOptions options) {
  check_sim_args(n, power, trials);
  if (record.message_count < 1) throw DomainError("encoder: message_count must be >= 1");

  SimBatch batch;
  batch.encoder = record;
  batch.n = n;
  batch.power = power;
  batch.seed = seed;
  batch.traces.resize(static_cast<std::size_t>(trials));

  const double budget = static_cast<double>(n) * power;
  const double u_scale = kLog2E / (2.0 * (1.0 + power));
  const unsigned workers = std::max(1u, options.workers);
  std::vector<std::uint64_t> rejected(workers, 0);

  detail::parallel_for(trials, workers, [&](std::int64_t begin, std::int64_t end, unsigned w) {
    auto local = encoder.clone();
    std::vector<double> outputs(static_cast<std::size_t>(n));
    for (std::int64_t i = begin; i < end; ++i) {
      SimTrace& trace = batch.traces[static_cast<std::size_t>(i)];
      for (std::uint32_t attempt = 0;; ++attempt) {
        if (attempt >= options.max_attempts) {
          throw std::runtime_error("encoder exceeded its power budget on every attempt of trial " +
                                   std::to_string(i));
        }
        CounterStream stream(seed, static_cast<std::uint64_t>(i), attempt);
        const std::uint64_t message = 1 + stream.next_below(record.message_count);
        local->start(message);
        double energy = 0.0;
        double lambda = 0.0;
        bool overspent = false;
        for (std::int64_t k = 0; k < n; ++k) {
          const double x = local->symbol(k, message, std::span<const double>(outputs.data(), k), energy);
          energy += x * x;
          if (k < n - 1 && energy > budget * (1.0 + 1e-12)) {
            overspent = true;
            break;
          }
          const double z = stream.next_normal();
          outputs[static_cast<std::size_t>(k)] = x + z;
          lambda += -power * z * z + 2.0 * x * z;
        }
        if (overspent) {
          ++rejected[w];
          continue;
        }
        trace.seed = seed;
        trace.trial = static_cast<std::uint64_t>(i);
        trace.attempt = attempt;
        trace.n = n;
        trace.message = message;
        trace.lambda_sum = lambda;
        trace.u_sum = u_scale * (lambda + budget);
        trace.power_residual = std::abs(energy - budget);
        break;
      }
    }
  });

  batch.rejected_attempts = std::accumulate(rejected.begin(), rejected.end(), std::uint64_t{0});
  batch.empirical_cdf.reserve(batch.traces.size());
  for (const auto& t : batch.traces) batch.empirical_cdf.push_back(t.lambda_sum);
  std::sort(batch.empirical_cdf.begin(), batch.empirical_cdf.end());
  return batch;
}

void write_csv(const SimBatch& batch, std::ostream& out) {
  std::string line;
  out << "trial,lambda_sum,u_sum_bits,power_residual\n";
  for (const auto& t : batch.traces) {
    line.clear();
    append_integer(line, t.trial);
    line.push_back(',');
    append_number(line, t.lambda_sum);
    line.push_back(',');
    append_number(line, t.u_sum);
    line.push_back(',');
    append_number(line, t.power_residual);
    line.push_back('\n');
    out << line;
  }
}

IdentityReport verify_distribution_identity(const SimBatch& batch, double alpha) {
  if (batch.empirical_cdf.empty()) throw DomainError("verify_distribution_identity: empty batch");
  const SumStatisticLaw law = sum_statistic_law(batch.n, batch.power);
  IdentityReport r;
  r.trials = batch.empirical_cdf.size();
  r.ks_distance = ks_distance(batch.empirical_cdf, [&](double s) { return law.cdf(s); });
  r.critical_value = ks_critical_value(alpha, r.trials);
  r.pass = r.ks_distance < r.critical_value;
  return r;
}

std::vector<MgfPoint> verify_mgf(const SimBatch& batch, std::span<const double> t_grid) {
  if (batch.traces.empty()) throw DomainError("verify_mgf: empty batch");
  const double min_t = -1.0 / (4.0 * batch.power);
  double max_abs_lambda = 0.0;
  for (const auto& tr : batch.traces) max_abs_lambda = std::max(max_abs_lambda, std::abs(tr.lambda_sum));

  std::vector<MgfPoint> points;
  for (double t : t_grid) {
    if (!(t > min_t)) {
      throw DomainError("verify_mgf: t = " + std::to_string(t) +
                        " leaves the finite-variance region t > -1/(4P)");
    }
    if (std::abs(t) * max_abs_lambda > 700.0) {
      throw DomainError("verify_mgf: t = " + std::to_string(t) +
                        " overflows exp(t * lambda_sum) on this batch");
    }
    long double sum = 0.0L;
    long double sum_sq = 0.0L;
    for (const auto& tr : batch.traces) {
      const long double e = std::exp(static_cast<long double>(t) * tr.lambda_sum);
      sum += e;
      sum_sq += e * e;
    }
    const auto count = static_cast<long double>(batch.traces.size());
    const long double mean = sum / count;
    const long double var = std::max(0.0L, sum_sq / count - mean * mean);

    MgfPoint p;
    p.t = t;
    p.empirical = static_cast<double>(mean);
    p.closed_form = closed_form_mgf(t, batch.n, batch.power);
    p.standard_error = static_cast<double>(std::sqrt(var / count));
    const double dev = p.empirical - p.closed_form;
    p.z_score = p.standard_error > 0.0 ? dev / p.standard_error : (dev == 0.0 ? 0.0 : dev * INFINITY);
    points.push_back(p);
  }
  return points;
}

std::vector<BerryEsseenRow> berry_esseen_check(double power, std::span<const std::int64_t> n_list,
                                               std::int64_t trials, std::uint64_t seed,
                                               RunOptions options) {
  const LlrMoments m = llr_moments(power);
  const double s3 = m.sigma * m.sigma * m.sigma;
  std::vector<BerryEsseenRow> rows;
  for (std::int64_t n : n_list) {
    if (n < 1) throw DomainError("berry_esseen_check: n must be >= 1");
    const double needed = 100.0 * static_cast<double>(n) * s3 * s3 / (m.third_abs * m.third_abs);
    if (static_cast<double>(trials) < needed) {
      throw DomainError("berry_esseen_check: need at least " +
                        std::to_string(static_cast<std::int64_t>(std::ceil(needed))) +
                        " trials for n = " + std::to_string(n));
    }
    const SimBatch batch = run_batch(EncoderSpec{}, n, power, trials,
                                     mix64(seed ^ static_cast<std::uint64_t>(n)), options);
    const double norm = m.sigma * std::sqrt(static_cast<double>(n));
    std::vector<double> standardized;
    standardized.reserve(batch.traces.size());
    for (const auto& t : batch.traces) standardized.push_back(t.u_sum / norm);
    std::sort(standardized.begin(), standardized.end());

    BerryEsseenRow row;
    row.n = n;
    row.sup_dev = ks_distance(standardized, [](double a) { return normal_cdf(a); });
    row.bound = m.third_abs / (s3 * std::sqrt(static_cast<double>(n)));
    row.slack = ks_critical_value(0.01, standardized.size());
    row.pass = row.sup_dev <= row.bound + row.slack;
    rows.push_back(row);
  }
  return rows;
}

ParallelSimBatch run_parallel_batch(const ParallelSpec& spec, ParallelEncoderKind kind,
                                    std::int64_t n, std::int64_t trials, std::uint64_t seed,
                                    RunOptions options) {
  if (n < 1) throw DomainError("simulation: n must be >= 1");
  if (trials < 1) throw DomainError("simulation: trials must be >= 1");
  const PowerAllocation alloc = waterfill(spec);
  const std::size_t L = spec.size();
  const auto& variances = spec.noise_variances();
  const double total = spec.total_power();
  const double budget = static_cast<double>(n) * total;
  const std::size_t noisiest = static_cast<std::size_t>(
      std::max_element(variances.begin(), variances.end()) - variances.begin());

  ParallelSimBatch batch;
  batch.n = n;
  batch.encoder = kind;
  batch.u_sums.resize(static_cast<std::size_t>(trials));
  const unsigned workers = std::max(1u, options.workers);
  std::vector<double> residuals(workers, 0.0);

  detail::parallel_for(trials, workers, [&](std::int64_t begin, std::int64_t end, unsigned w) {
    std::vector<double> x(L);
    std::vector<double> last_y(L, 0.0);
    std::vector<double> weights(L);
    for (std::int64_t i = begin; i < end; ++i) {
      CounterStream stream(seed, static_cast<std::uint64_t>(i));
      const std::uint64_t message = stream.next_u64();
      std::fill(last_y.begin(), last_y.end(), 0.0);
      double energy = 0.0;
      double u = 0.0;
      for (std::int64_t k = 0; k < n; ++k) {
        const double remaining = std::max(0.0, budget - energy);
        switch (kind) {
          case ParallelEncoderKind::waterfill_constant:
            for (std::size_t l = 0; l < L; ++l) x[l] = std::sqrt(alloc.powers[l]);
            break;
          case ParallelEncoderKind::noisiest_channel:
            std::fill(x.begin(), x.end(), 0.0);
            x[noisiest] = std::sqrt(total);
            break;
          case ParallelEncoderKind::adaptive: {
            double mean_y = 0.0;
            for (double y : last_y) mean_y += y;
            mean_y /= static_cast<double>(L);
            const double step_energy =
                k == n - 1 ? remaining : std::min(remaining, total * (1.0 + 0.5 * std::tanh(mean_y)));
            double wsum = 0.0;
            for (std::size_t l = 0; l < L; ++l) {
              weights[l] = 1.0 + 0.9 * std::tanh(last_y[l]);
              wsum += weights[l];
            }
            const double sign =
                (mix64(message + static_cast<std::uint64_t>(k)) & 1u) ? 1.0 : -1.0;
            for (std::size_t l = 0; l < L; ++l) {
              x[l] = sign * std::sqrt(step_energy * weights[l] / wsum);
            }
            break;
          }
        }
        for (std::size_t l = 0; l < L; ++l) {
          const double z = std::sqrt(variances[l]) * stream.next_normal();
          const double p = alloc.powers[l];
          u += -p / variances[l] * z * z + p + 2.0 * x[l] * z;
          energy += x[l] * x[l];
          last_y[l] = x[l] + z;
        }
      }
      batch.u_sums[static_cast<std::size_t>(i)] = u;
      residuals[w] = std::max(residuals[w], std::abs(energy - budget));
    }
  });
  batch.max_power_residual = *std::max_element(residuals.begin(), residuals.end());
  return batch;
}

VarianceEstimate estimate_variance(const ParallelSimBatch& batch) {
  if (batch.u_sums.size() < 2) throw DomainError("estimate_variance: need at least two trials");
  const Moments m = central_moments(batch.u_sums);
  const auto count = static_cast<double>(batch.u_sums.size());
  const auto nd = static_cast<double>(batch.n);
  VarianceEstimate v;
  v.mean = m.mean;
  v.mean_standard_error = std::sqrt(m.m2 / count);
  v.per_use_variance = m.m2 * count / (count - 1.0) / nd;
  v.standard_error = std::sqrt(std::max(0.0, m.m4 - m.m2 * m.m2) / count) / nd;
  return v;
}

}  // namespace fbx
