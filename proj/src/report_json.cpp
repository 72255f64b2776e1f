#include "fbx/report_json.hpp"

#include <cmath>

namespace fbx {
namespace {

nlohmann::json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

nlohmann::json num_list(const std::vector<double>& v) {
  auto out = nlohmann::json::array();
  for (double x : v) out.push_back(num(x));
  return out;
}

}  // namespace

nlohmann::json to_json(const BoundReport& r) {
  nlohmann::json j;
  j["n"] = r.n;
  j["epsilon"] = num(r.epsilon);
  j["kind"] = std::string(to_string(r.kind));
  j["log_m_bound_bits"] = num(r.log_m_bound);
  j["threshold_log_xi_bits"] = r.threshold_log_xi ? num(*r.threshold_log_xi) : nlohmann::json(nullptr);
  if (r.constants) {
    const auto& c = *r.constants;
    j["constants"] = {{"sigma", num(c.sigma)},
                      {"T", num(c.third_abs)},
                      {"kappa_bar", num(c.kappa_bar)},
                      {"kappa", num(c.kappa)},
                      {"n_min", c.n_min}};
  } else {
    j["constants"] = nullptr;
  }
  return j;
}

nlohmann::json to_json(const ParallelBoundReport& r) {
  nlohmann::json j;
  j["n"] = r.n;
  j["epsilon"] = num(r.epsilon);
  j["kind"] = "theorem2";
  j["log_m_bound_bits"] = num(r.log_m_bound);
  j["water_level"] = num(r.water_level);
  j["powers"] = num_list(r.powers);
  j["kappa_tilde"] = num(r.constants.kappa_tilde);
  j["kappa_bar"] = num(r.constants.kappa_bar);
  j["constants"] = {{"kappa", num(r.constants.kappa)},
                    {"C_L", num(r.constants.capacity)},
                    {"V_L", num(r.constants.dispersion)}};
  j["kappa_form_holds"] = r.kappa_form_holds;
  return j;
}

nlohmann::json to_json(const PowerAllocation& a, const ParallelSpec& spec) {
  return {{"noise_variances", num_list(spec.noise_variances())},
          {"total_power", num(spec.total_power())},
          {"water_level", num(a.water_level)},
          {"powers", num_list(a.powers)},
          {"C_L", num(capacity_parallel(spec, a))},
          {"V_L", num(dispersion_parallel(spec, a))}};
}

nlohmann::json to_json(const StrongConverseReport& r) {
  auto rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"epsilon", num(row.epsilon)},
                    {"rate_bound", num(row.rate_bound)},
                    {"gap", num(row.gap)},
                    {"kappa", num(row.kappa)}});
  }
  return {{"n", r.n},
          {"C_L", num(r.capacity)},
          {"kappa_max", num(r.kappa_max)},
          {"max_gap", num(r.max_gap)},
          {"rows", rows},
          {"pass", r.pass}};
}

nlohmann::json to_json(const MetaconverseReport& r) {
  return {{"M", r.m},
          {"n", r.n},
          {"P", num(r.power)},
          {"trials", r.trials},
          {"alpha_hat", num(r.alpha_hat)},
          {"log2_beta", num(r.log2_beta)},
          {"log2_M", num(r.log2_m)},
          {"max_ci_width", num(r.max_ci_width)},
          {"pass", r.pass},
          {"status", std::string(to_string(r.status))}};
}

nlohmann::json to_json(const IdentityReport& r) {
  return {{"ks_distance", num(r.ks_distance)},
          {"critical_value", num(r.critical_value)},
          {"trials", r.trials},
          {"pass", r.pass}};
}

nlohmann::json to_json(const MgfPoint& p) {
  return {{"t", num(p.t)},
          {"empirical", num(p.empirical)},
          {"closed_form", num(p.closed_form)},
          {"standard_error", num(p.standard_error)},
          {"z_score", num(p.z_score)}};
}

nlohmann::json to_json(const BerryEsseenRow& r) {
  return {{"n", r.n},
          {"sup_dev", num(r.sup_dev)},
          {"bound", num(r.bound)},
          {"slack", num(r.slack)},
          {"pass", r.pass}};
}

nlohmann::json to_json(const VarianceEstimate& v) {
  return {{"mean", num(v.mean)},
          {"mean_standard_error", num(v.mean_standard_error)},
          {"per_use_variance", num(v.per_use_variance)},
          {"standard_error", num(v.standard_error)}};
}

nlohmann::json summary_json(const SimBatch& batch) {
  double max_residual = 0.0;
  for (const auto& t : batch.traces) max_residual = std::max(max_residual, t.power_residual);
  return {{"encoder", std::string(to_string(batch.encoder.kind))},
          {"message_count", batch.encoder.message_count},
          {"n", batch.n},
          {"P", num(batch.power)},
          {"seed", batch.seed},
          {"trials", batch.traces.size()},
          {"rejected_attempts", batch.rejected_attempts},
          {"max_power_residual", num(max_residual)}};
}

}  // namespace fbx
