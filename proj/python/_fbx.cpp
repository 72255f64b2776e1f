// Python bindings. Reports cross the boundary as JSON text and are decoded
// on the Python side, so field names match the CLI output.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fbx/awgn_bounds.hpp"
#include "fbx/error.hpp"
#include "fbx/feedback_sim.hpp"
#include "fbx/hypothesis.hpp"
#include "fbx/parallel.hpp"
#include "fbx/report_json.hpp"
#include "fbx/scalar_stats.hpp"

namespace py = pybind11;

namespace {

std::string bound_json(std::int64_t n, double eps, double power, const std::string& kind) {
  const fbx::ScalarChannel ch(power);
  if (kind == "finite") return fbx::to_json(fbx::finite_n_converse(ch, n, eps)).dump();
  if (kind == "kappa") return fbx::to_json(fbx::theorem1_kappa_form(ch, n, eps)).dump();
  if (kind == "normal") return fbx::to_json(fbx::normal_approximation(ch, n, eps)).dump();
  throw fbx::DomainError("kind must be finite, kappa or normal");
}

py::dict simulate(const std::string& encoder, std::int64_t n, double power, std::int64_t trials,
                  std::uint64_t seed, std::uint64_t messages, std::uint64_t codebook_seed, unsigned workers) {
  fbx::EncoderSpec spec;
  spec.kind = fbx::parse_encoder_kind(encoder);
  spec.message_count = messages;
  spec.codebook_seed = codebook_seed;
  fbx::SimBatch batch;
  {
    py::gil_scoped_release release;
    batch = fbx::run_batch(spec, n, power, trials, seed, {workers, 64});
  }
  std::vector<double> lambda;
  std::vector<double> u;
  std::vector<double> residual;
  for (const auto& t : batch.traces) {
    lambda.push_back(t.lambda_sum);
    u.push_back(t.u_sum);
    residual.push_back(t.power_residual);
  }
  std::ostringstream csv;
  fbx::write_csv(batch, csv);
  const auto id = fbx::verify_distribution_identity(batch);
  py::dict d;
  d["lambda_sum"] = lambda;
  d["u_sum_bits"] = u;
  d["power_residual"] = residual;
  d["csv"] = csv.str();
  d["summary"] = fbx::summary_json(batch).dump();
  d["identity"] = fbx::to_json(id).dump();
  return d;
}

}  // namespace

PYBIND11_MODULE(_fbx, m) {
  m.doc() = "Converse bounds and Monte Carlo checks for Gaussian channels with feedback";

  py::register_exception<fbx::DomainError>(m, "DomainError", PyExc_ValueError);

  m.def("capacity", [](double p) { return fbx::capacity(fbx::ScalarChannel(p)); }, py::arg("power"));
  m.def("dispersion", [](double p) { return fbx::dispersion(fbx::ScalarChannel(p)); }, py::arg("power"));
  m.def("llr_moments", [](double p) {
    const auto lm = fbx::llr_moments(p);
    return py::make_tuple(lm.mu, lm.sigma, lm.third_abs);
  }, py::arg("power"));
  m.def("noncentral_chisq_cdf", &fbx::noncentral_chisq_cdf, py::arg("x"), py::arg("dof"), py::arg("noncentrality"));
  m.def("closed_form_mgf", &fbx::closed_form_mgf, py::arg("t"), py::arg("n"), py::arg("power"));

  m.def("_bound", &bound_json, py::arg("n"), py::arg("eps"), py::arg("power"), py::arg("kind"));
  m.def("_parallel_bound", [](const std::vector<double>& s, double p, std::int64_t n, double eps) {
    return fbx::to_json(fbx::theorem2_bound(fbx::ParallelSpec(s, p), n, eps)).dump();
  }, py::arg("noise_variances"), py::arg("power"), py::arg("n"), py::arg("eps"));
  m.def("_waterfill", [](const std::vector<double>& s, double p) {
    const fbx::ParallelSpec spec(s, p);
    return fbx::to_json(fbx::waterfill(spec), spec).dump();
  }, py::arg("noise_variances"), py::arg("power"));

  m.def("beta_awgn", [](std::int64_t n, double p, double delta) {
    const auto r = fbx::beta_awgn(n, p, delta);
    return py::make_tuple(r.log2_beta, r.test.log_lr_threshold);
  }, py::arg("n"), py::arg("power"), py::arg("delta"));
  m.def("beta_finite", [](std::vector<double> p, std::vector<double> q, double delta) {
    const auto r = fbx::beta_finite(fbx::FiniteDistPair(std::move(p), std::move(q)), delta);
    return py::make_tuple(r.beta, r.test.log_lr_threshold, r.test.randomization);
  }, py::arg("p"), py::arg("q"), py::arg("delta"));

  m.def("_simulate", &simulate, py::arg("encoder"), py::arg("n"), py::arg("power"), py::arg("trials"),
        py::arg("seed"), py::arg("messages") = 1, py::arg("codebook_seed") = 0, py::arg("workers") = 1);
  m.def("_metaconverse", [](const std::string& code, std::uint64_t m, std::int64_t n, double p,
                            std::int64_t trials, std::uint64_t seed, unsigned workers) {
    const auto toy = code == "antipodal" ? fbx::ToyCode::antipodal(n, p) : fbx::ToyCode::spherical(m, n, p, seed);
    py::gil_scoped_release release;
    return fbx::to_json(fbx::metaconverse_check(toy, trials, seed, {workers, 64})).dump();
  }, py::arg("code"), py::arg("m"), py::arg("n"), py::arg("power"), py::arg("trials"), py::arg("seed"),
        py::arg("workers") = 1);
}
