#include "fbx/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fbx/error.hpp"
#include "fbx/philox.hpp"
#include "fbx/scalar_stats.hpp"
#include "parallel_for.hpp"

namespace fbx {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint32_t kNoiseOnlyLane = 1;

void check_distribution(const std::vector<double>& v, const char* name) {
  long double sum = 0.0L;
  for (double x : v) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw DomainError(std::string("FiniteDistPair: ") + name + " has a negative or non-finite entry");
    }
    sum += x;
  }
  if (std::abs(static_cast<double>(sum) - 1.0) > 1e-12) {
    throw DomainError(std::string("FiniteDistPair: ") + name + " does not sum to 1");
  }
}

// log2(p/q) with the conventions p/0 = +inf and 0/q = -inf.
double log2_ratio(double p, double q) {
  if (q == 0.0) return kInf;
  if (p == 0.0) return -kInf;
  return std::log2(p) - std::log2(q);
}

struct AwgnPair {
  double a;        // n/2 (ln(1+P) + 1), nats
  double coef_p;   // P / (2(1+P))
  double nc_p;     // n / P
  double nc_q;     // n (1+P) / P
  std::int64_t n;
  double power;
};

AwgnPair awgn_pair(std::int64_t n, double power) {
  if (n < 1) throw DomainError("beta_awgn: n must be >= 1");
  if (!(power > 0.0) || !std::isfinite(power)) throw DomainError("beta_awgn: power must be positive");
  const double nd = static_cast<double>(n);
  return {0.5 * nd * (std::log1p(power) + 1.0), power / (2.0 * (1.0 + power)), nd / power,
          nd * (1.0 + power) / power, n, power};
}

// Q with F_Q(q) = delta, Q noncentral chi-square (n, n/P).
double null_quantile(const AwgnPair& pr, double delta) {
  const double nd = static_cast<double>(pr.n);
  const double mean = nd + pr.nc_p;
  const double sd = std::sqrt(2.0 * (nd + 2.0 * pr.nc_p));
  double lo = 0.0;
  double hi = mean + 40.0 * sd + 10.0;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f = noncentral_chisq_cdf(mid, pr.n, pr.nc_p);
    if (std::abs(f - delta) < 1e-10) return mid;
    (f < delta ? lo : hi) = mid;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

FiniteDistPair::FiniteDistPair(std::vector<double> p, std::vector<double> q)
    : p_(std::move(p)), q_(std::move(q)) {
  if (p_.empty()) throw DomainError("FiniteDistPair: empty alphabet");
  if (p_.size() != q_.size()) throw DomainError("FiniteDistPair: p and q differ in length");
  check_distribution(p_, "p");
  check_distribution(q_, "q");
}

FiniteBeta beta_finite(const FiniteDistPair& pair, double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw DomainError("beta_finite: delta must lie in [0,1]");
  FiniteBeta out;
  if (delta == 0.0) {
    out.test = {kInf, 0.0};
    return out;
  }
  const auto& p = pair.p();
  const auto& q = pair.q();
  std::vector<std::size_t> order;
  std::vector<double> lr;
  for (std::size_t i = 0; i < pair.size(); ++i) {
    if (p[i] == 0.0 && q[i] == 0.0) continue;
    order.push_back(i);
  }
  lr.resize(pair.size());
  for (std::size_t i : order) lr[i] = log2_ratio(p[i], q[i]);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lr[a] > lr[b]; });

  long double p_acc = 0.0L;
  long double q_acc = 0.0L;
  std::size_t i = 0;
  while (i < order.size()) {
    // One likelihood-ratio level at a time.
    std::size_t j = i;
    long double p_level = 0.0L;
    long double q_level = 0.0L;
    while (j < order.size() && lr[order[j]] == lr[order[i]]) {
      p_level += p[order[j]];
      q_level += q[order[j]];
      ++j;
    }
    if (p_acc + p_level >= delta) {
      const long double gamma = p_level > 0.0L ? (delta - p_acc) / p_level : 0.0L;
      out.beta = static_cast<double>(q_acc + gamma * q_level);
      out.test = {lr[order[i]], static_cast<double>(std::clamp(gamma, 0.0L, 1.0L))};
      return out;
    }
    p_acc += p_level;
    q_acc += q_level;
    i = j;
  }
  // delta exceeds the accumulated p-mass only through rounding.
  out.beta = static_cast<double>(q_acc);
  out.test = {-kInf, 1.0};
  return out;
}

AwgnBeta beta_awgn(std::int64_t n, double power, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("beta_awgn: delta must lie in (0,1)");
  const AwgnPair pr = awgn_pair(n, power);
  const double q_thr = null_quantile(pr, delta);
  AwgnBeta out;
  out.log2_beta = noncentral_chisq_log_cdf(q_thr / (1.0 + power), n, pr.nc_q) * kLog2E;
  out.test = {(pr.a - pr.coef_p * q_thr) * kLog2E, 0.0};
  return out;
}

double beta_lower_bound(const FiniteDistPair& pair, double delta, double xi) {
  if (!(xi > 0.0)) throw DomainError("beta_lower_bound: xi must be positive");
  const double log2_xi = std::log2(xi);
  long double tail = 0.0L;
  for (std::size_t i = 0; i < pair.size(); ++i) {
    if (pair.p()[i] > 0.0 && log2_ratio(pair.p()[i], pair.q()[i]) >= log2_xi) tail += pair.p()[i];
  }
  return static_cast<double>((delta - tail) / xi);
}

double beta_lower_bound_awgn(std::int64_t n, double power, double delta, double log2_xi) {
  const AwgnPair pr = awgn_pair(n, power);
  // LLR >= log_xi  <=>  Q <= (A - log_xi ln 2) / coef_p.
  const double q_edge = (pr.a - log2_xi / kLog2E) / pr.coef_p;
  const double tail = q_edge <= 0.0 ? 0.0 : noncentral_chisq_cdf(q_edge, n, pr.nc_p);
  const double bracket = delta - tail;
  if (!(bracket > 0.0)) return -kInf;
  return std::log2(bracket) - log2_xi;
}

ToyCode::ToyCode(std::int64_t n, double power, std::vector<std::vector<double>> codewords)
    : m_(codewords.size()), n_(n), power_(power), codewords_(std::move(codewords)) {}

ToyCode ToyCode::antipodal(std::int64_t n, double power) {
  if (n < 1 || !(power > 0.0)) throw DomainError("ToyCode: need n >= 1 and P > 0");
  const double a = std::sqrt(power);
  const auto len = static_cast<std::size_t>(n);
  return ToyCode(n, power, {std::vector<double>(len, a), std::vector<double>(len, -a)});
}

ToyCode ToyCode::spherical(std::uint64_t m, std::int64_t n, double power, std::uint64_t seed) {
  if (m < 1 || n < 1 || !(power > 0.0)) throw DomainError("ToyCode: need M >= 1, n >= 1 and P > 0");
  std::vector<std::vector<double>> book(m, std::vector<double>(static_cast<std::size_t>(n)));
  for (std::uint64_t w = 0; w < m; ++w) {
    CounterStream stream(seed, w, 0xC0DEu);
    double norm2 = 0.0;
    for (auto& x : book[w]) {
      x = stream.next_normal();
      norm2 += x * x;
    }
    const double scale = std::sqrt(static_cast<double>(n) * power / norm2);
    for (auto& x : book[w]) x *= scale;
  }
  return ToyCode(n, power, std::move(book));
}

std::uint64_t ToyCode::decode(const std::vector<double>& y) const {
  std::uint64_t best = 0;
  double best_d = kInf;
  for (std::uint64_t w = 0; w < m_; ++w) {
    double d = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
      const double e = y[k] - codewords_[w][k];
      d += e * e;
    }
    if (d < best_d) {
      best_d = d;
      best = w;
    }
  }
  return best;
}

std::string_view to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::inconclusive: return "inconclusive";
  }
  return "unknown";
}

MetaconverseReport metaconverse_check(const ToyCode& code, std::int64_t trials, std::uint64_t seed,
                                      RunOptions options) {
  if (trials < 1) throw DomainError("metaconverse_check: trials must be >= 1");
  const std::uint64_t m = code.size();
  const auto n = code.length();
  MetaconverseReport r;
  r.m = m;
  r.n = n;
  r.power = code.power();
  r.trials = trials;
  r.log2_m = std::log2(static_cast<double>(m));

  const unsigned workers = std::max(1u, options.workers);
  // Integer counts keep the merge independent of the worker count.
  std::vector<std::vector<std::uint64_t>> joint(workers, std::vector<std::uint64_t>(m * m, 0));
  std::vector<std::vector<std::uint64_t>> noise_only(workers, std::vector<std::uint64_t>(m, 0));
  const double out_sd = std::sqrt(1.0 + code.power());

  detail::parallel_for(trials, workers, [&](std::int64_t begin, std::int64_t end, unsigned wk) {
    std::vector<double> y(static_cast<std::size_t>(n));
    for (std::int64_t i = begin; i < end; ++i) {
      CounterStream stream(seed, static_cast<std::uint64_t>(i));
      const std::uint64_t w = stream.next_below(m);
      const auto& c = code.codeword(w);
      for (std::size_t k = 0; k < y.size(); ++k) y[k] = c[k] + stream.next_normal();
      ++joint[wk][w * m + code.decode(y)];

      CounterStream ref(seed, static_cast<std::uint64_t>(i), kNoiseOnlyLane);
      for (auto& v : y) v = out_sd * ref.next_normal();
      ++noise_only[wk][code.decode(y)];
    }
  });

  std::vector<std::uint64_t> jc(m * m, 0);
  std::vector<std::uint64_t> sc(m, 0);
  for (unsigned wk = 0; wk < workers; ++wk) {
    for (std::size_t c = 0; c < jc.size(); ++c) jc[c] += joint[wk][c];
    for (std::size_t c = 0; c < sc.size(); ++c) sc[c] += noise_only[wk][c];
  }

  const auto nt = static_cast<double>(trials);
  std::vector<double> p(m * m);
  std::vector<double> q(m * m);
  // Messages are drawn uniformly, so p_W is known exactly.
  const double p_w = 1.0 / static_cast<double>(m);
  std::uint64_t correct = 0;
  for (std::uint64_t w = 0; w < m; ++w) {
    correct += jc[w * m + w];
    for (std::uint64_t v = 0; v < m; ++v) {
      p[w * m + v] = static_cast<double>(jc[w * m + v]) / nt;
      q[w * m + v] = p_w * static_cast<double>(sc[v]) / nt;
    }
  }
  auto normalize = [](std::vector<double>& v) {
    const double s = std::accumulate(v.begin(), v.end(), 0.0);
    for (auto& x : v) x /= s;
  };
  normalize(p);
  normalize(q);

  double widest = 0.0;
  for (double x : p) widest = std::max(widest, 2.0 * 1.959963984540054 * std::sqrt(x * (1.0 - x) / nt));
  r.max_ci_width = widest;
  r.alpha_hat = 1.0 - static_cast<double>(correct) / nt;

  const FiniteBeta fb = beta_finite(FiniteDistPair(p, q), std::min(1.0, 1.0 - r.alpha_hat));
  r.log2_beta = fb.beta > 0.0 ? std::log2(fb.beta) : -kInf;
  // Sampling noise in p and q moves beta by O(1/sqrt(trials)); that is
  // the allowance on the inequality.
  const double slack = 3.0 / std::sqrt(nt);
  r.pass = fb.beta <= (1.0 + slack) / static_cast<double>(m);
  if (widest > 0.02) {
    r.status = CheckStatus::inconclusive;
  } else {
    r.status = r.pass ? CheckStatus::pass : CheckStatus::fail;
  }
  return r;
}

}  // namespace fbx
