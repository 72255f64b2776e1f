// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is the number of failed criteria.
//
// Usage: fbx_acceptance [criterion ...]

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "fbx/awgn_bounds.hpp"
#include "fbx/error.hpp"
#include "fbx/feedback_sim.hpp"
#include "fbx/hypothesis.hpp"
#include "fbx/parallel.hpp"
#include "fbx/scalar_stats.hpp"

using namespace fbx;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

RunOptions run_options() {
  return {std::max(1u, std::thread::hardware_concurrency()), 64};
}

double ref_quantile(double p) { return boost::math::quantile(boost::math::normal_distribution<double>(), p); }

EncoderSpec encoder(EncoderKind k) {
  EncoderSpec e;
  e.kind = k;
  e.message_count = 16;
  e.codebook_seed = 2024;
  return e;
}

const EncoderKind kValidEncoders[] = {EncoderKind::constant_sqrtP, EncoderKind::random_spherical,
                                      EncoderKind::adaptive_toy};

Outcome formula_fidelity() {
  Outcome o;
  o.require(capacity(ScalarChannel(1.0)) == 0.5, "C(1) == 0.5 exactly");
  o.require(capacity(ScalarChannel(3.0)) == 1.0, "C(3) == 1.0 exactly");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lg(-3.0, 3.0);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double p = std::pow(10.0, lg(rng));
    const double v = dispersion(ScalarChannel(p));
    const double s = llr_moments(p).sigma;
    worst = std::max(worst, std::abs(s * s - v) / v);
  }
  o.require(worst < 1e-12, fmt("sigma^2 vs V over 50 random P: max rel err %.3g", worst));
  return o;
}

Outcome mgf_identity() {
  Outcome o;
  const double ts[] = {-0.1, -0.02, 0.05};
  std::uint64_t seed = 200;
  for (auto k : kValidEncoders) {
    const auto batch = run_batch(encoder(k), 16, 1.0, 1'000'000, seed++, run_options());
    for (const auto& p : verify_mgf(batch, ts)) {
      o.require(std::abs(p.z_score) <= 3.0,
                fmt("%-16s t=%+.2f empirical %.6f closed form %.6f z=%+.2f", std::string(to_string(k)).c_str(), p.t,
                    p.empirical, p.closed_form, p.z_score));
    }
  }
  return o;
}

Outcome distribution_identity() {
  Outcome o;
  std::uint64_t seed = 300;
  for (auto k : kValidEncoders) {
    const auto r = verify_distribution_identity(run_batch(encoder(k), 64, 1.0, 100'000, seed++, run_options()));
    o.require(r.pass, fmt("%-16s KS %.5f < %.5f", std::string(to_string(k)).c_str(), r.ks_distance, r.critical_value));
  }
  const auto bad = verify_distribution_identity(
      run_batch(encoder(EncoderKind::power_violating), 64, 1.0, 100'000, seed, run_options()));
  o.require(!bad.pass, fmt("power_violating rejected: KS %.5f >= %.5f", bad.ks_distance, bad.critical_value));
  return o;
}

Outcome berry_esseen() {
  Outcome o;
  const std::int64_t ns[] = {16, 64, 256};
  for (const auto& r : berry_esseen_check(1.0, ns, 1'000'000, 400, run_options())) {
    o.require(r.pass, fmt("n=%-4lld sup dev %.5f <= %.5f + %.5f", static_cast<long long>(r.n), r.sup_dev, r.bound,
                          r.slack));
  }
  return o;
}

Outcome converse_chain() {
  Outcome o;
  const ScalarChannel ch(1.0);
  for (double eps : {0.1, 0.5}) {
    for (std::int64_t n : {100, 1000, 10000}) {
      const double info = -beta_awgn(n, 1.0, 1.0 - eps).log2_beta;
      const double kappa = theorem1_kappa_form(ch, n, eps).log_m_bound;
      try {
        const double finite = finite_n_converse(ch, n, eps).log_m_bound;
        o.require(info <= finite + 1e-9 && finite <= kappa + 1e-9,
                  fmt("eps=%.1f n=%-6lld %.4f <= %.4f <= %.4f", eps, static_cast<long long>(n), info, finite, kappa));
      } catch (const DomainError& e) {
        o.require(false, fmt("eps=%.1f n=%-6lld -log2 beta %.4f, finite converse undefined (%s)", eps,
                             static_cast<long long>(n), info, e.what()));
      }
    }
  }
  return o;
}

Outcome expansion() {
  Outcome o;
  const ScalarChannel ch(1.0);
  const double cap = capacity(ch);
  const double v = dispersion(ch);
  for (double eps : {0.1, 0.5}) {
    const double kappa = converse_constants(ch, eps).kappa;
    double worst = 0.0;
    double lo = INFINITY;
    double hi = -INFINITY;
    for (int i = 0; i <= 40; ++i) {
      const auto n = static_cast<std::int64_t>(std::llround(std::pow(10.0, 3.0 + 0.1 * i)));
      const long double nd = static_cast<long double>(n);
      const long double base = nd * cap + std::sqrt(nd * v) * ref_quantile(eps) + 0.5L * std::log2(nd);
      const long double rk = theorem1_kappa_form(ch, n, eps).log_m_bound - base;
      const long double rf = finite_n_converse(ch, n, eps).log_m_bound - base;
      worst = std::max(worst, static_cast<double>(std::abs(rk - kappa)));
      lo = std::min(lo, static_cast<double>(rf));
      hi = std::max(hi, static_cast<double>(rf));
    }
    o.require(worst <= 1e-9, fmt("eps=%.1f kappa-form residual - kappa: max |dev| %.3g over n in [1e3, 1e7]", eps, worst));
    o.require(hi - lo < 8.0, fmt("eps=%.1f finite residual window [%.3f, %.3f], width %.3f", eps, lo, hi, hi - lo));
  }
  return o;
}

Outcome water_filling() {
  Outcome o;
  const auto a = waterfill(ParallelSpec({1.0, 3.0}, 4.0));
  o.require(std::abs(a.water_level - 4.0) < 1e-9 && std::abs(a.powers[0] - 3.0) < 1e-9 &&
                std::abs(a.powers[1] - 1.0) < 1e-9,
            fmt("(1,3), P=4: level %.12g powers (%.12g, %.12g)", a.water_level, a.powers[0], a.powers[1]));
  const auto b = waterfill(ParallelSpec({1.0, 10.0}, 2.0));
  o.require(std::abs(b.water_level - 3.0) < 1e-9 && std::abs(b.powers[0] - 2.0) < 1e-9 &&
                std::abs(b.powers[1]) < 1e-9,
            fmt("(1,10), P=2: level %.12g powers (%.12g, %.12g)", b.water_level, b.powers[0], b.powers[1]));
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> size(1, 16);
  std::uniform_real_distribution<double> lg(-2.0, 2.0);
  double worst = 0.0;
  for (int it = 0; it < 200; ++it) {
    std::vector<double> s(static_cast<std::size_t>(size(rng)));
    for (auto& x : s) x = std::pow(10.0, lg(rng));
    const double p = std::pow(10.0, lg(rng));
    const auto w = waterfill(ParallelSpec(s, p));
    double total = 0.0;
    for (std::size_t l = 0; l < s.size(); ++l) {
      total += w.powers[l];
      worst = std::max(worst, w.powers[l] > 0.0 ? std::abs(w.powers[l] + s[l] - w.water_level)
                                                : std::max(0.0, w.water_level - s[l]));
      worst = std::max(worst, std::max(0.0, -w.powers[l]));
    }
    worst = std::max(worst, std::abs(total - p));
  }
  o.require(worst < 1e-9, fmt("200 random specs: max KKT residual %.3g", worst));
  return o;
}

Outcome strong_converse() {
  Outcome o;
  const ParallelSpec spec({1.0, 3.0}, 4.0);
  const double cl = capacity_parallel(spec);
  for (std::int64_t n : {100, 10000, 1000000}) {
    for (double eps : {0.1, 0.5, 0.9}) {
      const auto r = theorem2_bound(spec, n, eps);
      const double gap = r.log_m_bound / static_cast<double>(n) - cl;
      const double allowed = r.constants.kappa / std::sqrt(static_cast<double>(n));
      o.require(gap <= allowed, fmt("n=%-8lld eps=%.1f rate - C_L = %.6f <= kappa/sqrt(n) = %.6f",
                                    static_cast<long long>(n), eps, gap, allowed));
    }
  }
  const auto env = variance_envelope(spec);
  std::uint64_t seed = 800;
  for (auto k : {ParallelEncoderKind::waterfill_constant, ParallelEncoderKind::adaptive,
                 ParallelEncoderKind::noisiest_channel}) {
    const auto v = estimate_variance(run_parallel_batch(spec, k, 64, 200'000, seed++, run_options()));
    const double tol = 3.0 * v.standard_error;
    o.require(v.per_use_variance > env.kappa_tilde - tol && v.per_use_variance <= env.kappa_bar + tol,
              fmt("%-18s Var/n = %.3f +- %.3f in (%.1f, %.1f]", std::string(to_string(k)).c_str(), v.per_use_variance,
                  v.standard_error, env.kappa_tilde, env.kappa_bar));
  }
  return o;
}

Outcome meta_converse() {
  Outcome o;
  const ToyCode codes[] = {ToyCode::antipodal(4, 1.0), ToyCode::spherical(4, 8, 1.0, 2024)};
  std::uint64_t seed = 900;
  for (const auto& code : codes) {
    const auto r = metaconverse_check(code, 1'000'000, seed++, run_options());
    o.require(r.status == CheckStatus::pass,
              fmt("M=%llu n=%lld alpha %.5f log2 M %.4f <= -log2 beta %.4f (%s, widest CI %.4f)",
                  static_cast<unsigned long long>(r.m), static_cast<long long>(r.n), r.alpha_hat, r.log2_m,
                  -r.log2_beta, std::string(to_string(r.status)).c_str(), r.max_ci_width));
  }
  return o;
}

Outcome determinism() {
  Outcome o;
  for (auto k : {EncoderKind::constant_sqrtP, EncoderKind::random_spherical, EncoderKind::adaptive_toy,
                 EncoderKind::power_violating}) {
    std::string first;
    bool same = true;
    for (unsigned w : {1u, 2u, 5u, 8u}) {
      std::ostringstream out;
      write_csv(run_batch(encoder(k), 32, 1.0, 20'000, 1000, {w, 64}), out);
      if (first.empty()) first = out.str();
      else same = same && out.str() == first;
    }
    o.require(same, fmt("%-16s CSV identical for workers 1, 2, 5, 8 (%zu bytes)", std::string(to_string(k)).c_str(),
                        first.size()));
  }
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "formula fidelity", 1.0, formula_fidelity},
      {2, "MGF identity", 120.0, mgf_identity},
      {3, "distribution identity", 120.0, distribution_identity},
      {4, "Berry-Esseen envelope", 300.0, berry_esseen},
      {5, "converse-chain consistency", 60.0, converse_chain},
      {6, "second-order expansion", 1.0, expansion},
      {7, "water-filling", 1.0, water_filling},
      {8, "parallel strong converse", 180.0, strong_converse},
      {9, "meta-converse", 180.0, meta_converse},
      {10, "determinism", 60.0, determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < c.budget_s, fmt("runtime %.2f s (budget %.0f s)", secs, c.budget_s));
    std::printf("criterion %2d %-28s %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL");
    for (const auto& n : o.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed;
}
