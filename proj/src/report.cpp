#include "irflow/report.hpp"

#include <cstdio>
#include <limits>
#include <utility>

#include <json.hpp>

namespace irflow {

std::string format_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string to_csv(const CascadeReport& report) {
  std::string out =
      "n,rho_n,E_n,gap_n,energy_step,proj_step,contraction_q,sigma1_elem,"
      "residual_full\n";
  for (const auto& rec : report.records) {
    out += std::to_string(rec.n);
    out += ',' + format_float(rec.rho_n);
    out += ',' + format_float(rec.E_n);
    out += ',' + format_float(rec.gap_n);
    out += ',';
    if (rec.energy_step) out += format_float(*rec.energy_step);
    out += ',';
    if (rec.proj_step) out += format_float(*rec.proj_step);
    out += ',' + format_float(rec.contraction_q);
    out += ',' + format_float(rec.sigma1_elem);
    out += ',' + format_float(rec.residual_full);
    out += '\n';
  }
  return out;
}

namespace {

using nlohmann::json;

json params_json(const ModelParams& p) {
  json j;
  j["g"] = p.g;
  j["gamma"] = p.gamma;
  j["kappa"] = p.kappa;
  j["J"] = p.J;
  j["N_max"] = p.N_max;
  j["N_scales"] = p.N_scales;
  j["tol_eig"] = p.tol_eig;
  j["riesz"] = {{"radius_factor", p.riesz.radius_factor},
                {"nodes", p.riesz.nodes}};
  if (p.f.name() == "table") {
    json pts = json::array();
    for (const auto& [r, v] : p.f.points()) pts.push_back({r, v});
    j["f_profile"] = pts;
  } else {
    j["f_profile"] = p.f.name();
  }
  return j;
}

json record_json(const ScaleRecord& rec) {
  json j;
  j["n"] = rec.n;
  j["rho_n"] = rec.rho_n;
  j["E_n"] = rec.E_n;
  j["gap_n"] = rec.gap_n;
  j["gap_matrix"] = rec.gap_matrix;
  j["gap_tilde"] = rec.gap_tilde;
  j["E_tilde"] = rec.E_tilde;
  j["energy_step"] =
      rec.energy_step ? json(*rec.energy_step) : json(nullptr);
  j["proj_step"] = rec.proj_step ? json(*rec.proj_step) : json(nullptr);
  j["contraction_q"] = rec.contraction_q;
  j["sigma1_elem"] = rec.sigma1_elem;
  j["residual_full"] = rec.residual_full;
  return j;
}

json check_json(const BoundCheck& c) {
  json j;
  j["name"] = c.name;
  j["scale"] = c.scale;
  j["lhs"] = c.lhs;
  j["rhs"] = c.rhs;
  j["slack"] = c.slack;
  j["margin"] = c.margin;
  j["pass"] = c.pass;
  j["anchor"] = c.anchor;
  return j;
}

}  // namespace

std::string to_json(const CascadeReport& report) {
  json j;
  j["params"] = params_json(report.params);
  j["mode"] = report.mode == CouplingMode::OffDiagonal
                  ? "offdiagonal"
                  : "diagonal_benchmark";
  j["records"] = json::array();
  for (const auto& rec : report.records) j["records"].push_back(record_json(rec));
  j["checks"] = json::array();
  for (const auto& c : report.checks) j["checks"].push_back(check_json(c));
  if (report.e_gs) {
    j["e_gs"] = {{"value", report.e_gs->value},
                 {"error_bound", report.e_gs->error_bound},
                 {"residual_full", report.e_gs->residual_full}};
  } else {
    j["e_gs"] = nullptr;
  }
  if (!report.diagonal_oracle.empty()) {
    j["diagonal_oracle"] = json::array();
    for (const auto& row : report.diagonal_oracle) {
      json r;
      r["n"] = row.n;
      r["e_exact"] = row.e_exact;
      r["overlap_step_exact"] = row.overlap_step_exact
                                    ? json(*row.overlap_step_exact)
                                    : json(nullptr);
      r["overlap_step_numeric"] = row.overlap_step_numeric
                                      ? json(*row.overlap_step_numeric)
                                      : json(nullptr);
      j["diagonal_oracle"].push_back(r);
    }
  }
  if (report.truncation) {
    j["truncation"] = {{"n_max_ref", report.truncation->n_max_ref},
                       {"max_energy_delta", report.truncation->max_energy_delta},
                       {"max_proj_delta", report.truncation->max_proj_delta}};
  } else {
    j["truncation"] = nullptr;
  }
  j["failure"] = report.failure ? json(*report.failure) : json(nullptr);
  return j.dump(2) + "\n";
}

std::string sweep_summary_csv(
    const std::string& param,
    const std::vector<std::pair<double, CascadeReport>>& points) {
  std::string out = param + ",E_gs,checks_total,checks_failed,worst_margin\n";
  for (const auto& [value, report] : points) {
    int failed = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& c : report.checks) {
      if (!c.pass) ++failed;
      worst = std::min(worst, c.margin);
    }
    const double egs =
        report.records.empty() ? 0.0 : report.records.back().E_n;
    out += format_float(value);
    out += ',' + format_float(egs);
    out += ',' + std::to_string(report.checks.size());
    out += ',' + std::to_string(failed);
    out += ',' + (report.checks.empty() ? std::string("")
                                        : format_float(worst));
    out += '\n';
  }
  return out;
}

}  // namespace irflow
