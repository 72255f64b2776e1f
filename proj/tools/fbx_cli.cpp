// fbx: bounds, water-filling, simulation and verification from the shell.
//
// Exit codes: 0 ok, 1 usage, 2 domain error, 3 a statistical check failed.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fbx/awgn_bounds.hpp"
#include "fbx/error.hpp"
#include "fbx/feedback_sim.hpp"
#include "fbx/hypothesis.hpp"
#include "fbx/parallel.hpp"
#include "fbx/report_json.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitDomain = 2;
constexpr int kExitStatFail = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string output;
  unsigned workers = 1;
  std::optional<std::uint64_t> seed;
};

std::uint64_t resolve_seed(const Common& c) {
  if (c.seed) return *c.seed;
  if (const char* env = std::getenv("FBX_SEED")) {
    try {
      std::size_t pos = 0;
      const auto v = std::stoull(env, &pos, 0);
      if (pos == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("FBX_SEED is not an unsigned integer: ") + env);
  }
  return 0;
}

// Writes to --output when given, stdout otherwise.
void emit(const Common& c, const std::string& text) {
  if (c.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.output, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + c.output);
  f << text;
}

std::vector<std::int64_t> parse_n_grid(const std::string& spec) {
  const auto a = spec.find(':');
  const auto b = spec.find(':', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos) {
    throw UsageError("--n-grid expects start:stop:points");
  }
  double start = 0;
  double stop = 0;
  long points = 0;
  try {
    start = std::stod(spec.substr(0, a));
    stop = std::stod(spec.substr(a + 1, b - a - 1));
    points = std::stol(spec.substr(b + 1));
  } catch (const std::exception&) {
    throw UsageError("--n-grid expects start:stop:points");
  }
  if (points < 1 || start < 1 || stop < start) throw UsageError("--n-grid is empty");
  std::vector<std::int64_t> grid;
  for (long i = 0; i < points; ++i) {
    const double f = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    const auto n = static_cast<std::int64_t>(std::llround(start * std::pow(stop / start, f)));
    if (grid.empty() || grid.back() != n) grid.push_back(n);
  }
  return grid;
}

std::string csv_number(double v) {
  if (!std::isfinite(v)) return "";
  return nlohmann::json(v).dump();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-blocklength converse bounds for Gaussian channels with feedback"};
  app.require_subcommand(1);
  Common common;

  auto add_common = [&](CLI::App* sub, bool with_seed) {
    sub->add_option("-o,--output", common.output, "Output file (default stdout)");
    if (with_seed) {
      sub->add_option("--workers", common.workers, "Worker threads; results do not depend on it")
          ->check(CLI::PositiveNumber);
      sub->add_option_function<std::uint64_t>(
          "--seed", [&](const std::uint64_t& s) { common.seed = s; }, "Seed (else FBX_SEED, else 0)");
    }
  };

  // bound
  std::string channel = "awgn";
  std::string kind = "finite";
  std::int64_t n = 0;
  double eps = 0.0;
  double snr = 1.0;
  std::vector<double> sigmas;
  double total_power = 0.0;
  auto* bound = app.add_subcommand("bound", "Evaluate a converse or the normal approximation");
  bound->add_option("--channel", channel)->check(CLI::IsMember({"awgn", "parallel"}));
  bound->add_option("--n", n, "Blocklength")->required();
  bound->add_option("--eps", eps, "Error probability")->required();
  bound->add_option("--snr", snr, "Signal power P (linear, unit noise)");
  bound->add_option("--sigmas", sigmas, "Noise variances, comma separated")->delimiter(',');
  bound->add_option("--power", total_power, "Total power for --channel parallel");
  bound->add_option("--kind", kind)->check(CLI::IsMember({"finite", "kappa", "normal"}));
  add_common(bound, false);

  // waterfill
  auto* wf = app.add_subcommand("waterfill", "Water-filling allocation for parallel channels");
  wf->add_option("--sigmas", sigmas)->delimiter(',')->required();
  wf->add_option("--power", total_power)->required();
  add_common(wf, false);

  // sweep
  std::string n_grid;
  auto* sweep = app.add_subcommand("sweep", "CSV of all three curves over a log-spaced n grid");
  sweep->add_option("--n-grid", n_grid, "start:stop:points")->required();
  sweep->add_option("--eps", eps)->required();
  sweep->add_option("--snr", snr);
  add_common(sweep, false);

  // simulate / verify
  std::string encoder = "constant";
  std::int64_t trials = 0;
  std::uint64_t messages = 1;
  std::uint64_t codebook_seed = 0;
  double gain = 0.5;
  std::string check;
  std::vector<double> t_grid{-0.1, -0.02, 0.05};
  std::vector<std::int64_t> n_list{16, 64, 256};
  std::string code = "antipodal";
  double alpha = 0.01;
  auto add_sim = [&](CLI::App* sub) {
    sub->add_option("--encoder", encoder)
        ->check(CLI::IsMember({"constant", "spherical", "adaptive", "power-violating"}));
    sub->add_option("--n", n);
    sub->add_option("--trials", trials)->required();
    sub->add_option("--snr", snr);
    sub->add_option("--messages", messages, "Message set size M");
    sub->add_option("--codebook-seed", codebook_seed);
    sub->add_option("--gain", gain, "Feedback gain of the adaptive encoder");
    add_common(sub, true);
  };
  auto* simulate = app.add_subcommand("simulate", "Simulate a feedback code and write per-trial CSV");
  add_sim(simulate);
  simulate->get_option("--n")->required();
  auto* verify = app.add_subcommand("verify", "Run a statistical check; exit 3 when it fails");
  add_sim(verify);
  verify->add_option("--check", check)
      ->check(CLI::IsMember({"identity", "mgf", "berry-esseen", "metaconverse"}))
      ->required();
  verify->add_option("--t-grid", t_grid)->delimiter(',');
  verify->add_option("--n-list", n_list)->delimiter(',');
  verify->add_option("--code", code)->check(CLI::IsMember({"antipodal", "spherical"}));
  verify->add_option("--alpha", alpha, "KS significance level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*bound) {
      nlohmann::json j;
      if (channel == "awgn") {
        const fbx::ScalarChannel ch(snr);
        if (kind == "finite") j = fbx::to_json(fbx::finite_n_converse(ch, n, eps));
        else if (kind == "kappa") j = fbx::to_json(fbx::theorem1_kappa_form(ch, n, eps));
        else j = fbx::to_json(fbx::normal_approximation(ch, n, eps));
      } else {
        if (sigmas.empty()) throw UsageError("--channel parallel needs --sigmas");
        j = fbx::to_json(fbx::theorem2_bound(fbx::ParallelSpec(sigmas, total_power), n, eps));
      }
      emit(common, j.dump(2) + "\n");
      return 0;
    }
    if (*wf) {
      const fbx::ParallelSpec spec(sigmas, total_power);
      emit(common, fbx::to_json(fbx::waterfill(spec), spec).dump(2) + "\n");
      return 0;
    }
    if (*sweep) {
      const fbx::ScalarChannel ch(snr);
      std::string out = "n,normal_approximation,finite_n_converse,theorem1_kappa_form\n";
      for (const auto ni : parse_n_grid(n_grid)) {
        double finite = NAN;
        try {
          finite = fbx::finite_n_converse(ch, ni, eps).log_m_bound;
        } catch (const fbx::DomainError&) {
        }
        out += std::to_string(ni) + "," + csv_number(fbx::normal_approximation(ch, ni, eps).log_m_bound) +
               "," + csv_number(finite) + "," +
               csv_number(fbx::theorem1_kappa_form(ch, ni, eps).log_m_bound) + "\n";
      }
      emit(common, out);
      return 0;
    }

    const std::uint64_t seed = resolve_seed(common);
    fbx::RunOptions opts;
    opts.workers = common.workers;
    fbx::EncoderSpec spec;
    spec.kind = fbx::parse_encoder_kind(encoder);
    spec.message_count = messages;
    spec.codebook_seed = codebook_seed;
    spec.feedback_gain = gain;

    if (*simulate) {
      const auto batch = fbx::run_batch(spec, n, snr, trials, seed, opts);
      std::ostringstream csv;
      fbx::write_csv(batch, csv);
      emit(common, csv.str());
      if (!common.output.empty()) std::cout << fbx::summary_json(batch).dump() << "\n";
      return 0;
    }

    // verify
    nlohmann::json j;
    j["check"] = check;
    j["seed"] = seed;
    bool pass = true;
    if (check == "identity" || check == "mgf") {
      if (n < 1) throw UsageError("--n is required for this check");
      const auto batch = fbx::run_batch(spec, n, snr, trials, seed, opts);
      j["batch"] = fbx::summary_json(batch);
      if (check == "identity") {
        const auto r = fbx::verify_distribution_identity(batch, alpha);
        j["result"] = fbx::to_json(r);
        pass = r.pass;
      } else {
        auto points = nlohmann::json::array();
        for (const auto& p : fbx::verify_mgf(batch, t_grid)) {
          points.push_back(fbx::to_json(p));
          pass = pass && std::abs(p.z_score) <= 3.0;
        }
        j["result"] = points;
      }
    } else if (check == "berry-esseen") {
      auto rows = nlohmann::json::array();
      for (const auto& r : fbx::berry_esseen_check(snr, n_list, trials, seed, opts)) {
        rows.push_back(fbx::to_json(r));
        pass = pass && r.pass;
      }
      j["result"] = rows;
    } else {
      if (n < 1) throw UsageError("--n is required for this check");
      const auto toy = code == "antipodal" ? fbx::ToyCode::antipodal(n, snr)
                                           : fbx::ToyCode::spherical(messages, n, snr, codebook_seed);
      const auto r = fbx::metaconverse_check(toy, trials, seed, opts);
      j["result"] = fbx::to_json(r);
      pass = r.status != fbx::CheckStatus::fail;
    }
    j["pass"] = pass;
    emit(common, j.dump(2) + "\n");
    if (!common.output.empty()) std::cout << (pass ? "pass" : "FAIL") << "\n";
    return pass ? 0 : kExitStatFail;
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fbx::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
}
