#include "irflow/cli.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "irflow/report.hpp"

namespace irflow::cli {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const char* where,
                         std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok)
      throw ConfigError(std::string("unknown key \"") + key + "\" in " +
                        where);
  }
}

double require_number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number())
    throw ConfigError(std::string(key) + " must be a number");
  return obj[key].get<double>();
}

int require_int(const json& obj, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer())
    throw ConfigError(std::string(key) + " must be an integer");
  return obj[key].get<int>();
}

}  // namespace

RunConfig parse_config(const std::string& json_text,
                       bool allow_out_of_regime) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("config is not valid JSON: ") + err.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown_keys(j, "config",
                      {"g", "gamma", "kappa", "f_profile", "J", "N_max",
                       "N_scales", "tol_eig", "mode", "riesz", "sweep",
                       "output_dir", "emit"});

  RunConfig config;
  ModelParams& m = config.model;
  m.allow_out_of_regime = allow_out_of_regime;
  m.g = require_number(j, "g", m.g);
  m.gamma = require_number(j, "gamma", m.gamma);
  m.kappa = require_number(j, "kappa", m.kappa);
  m.J = require_int(j, "J", m.J);
  m.N_max = require_int(j, "N_max", m.N_max);
  m.N_scales = require_int(j, "N_scales", m.N_scales);
  m.tol_eig = require_number(j, "tol_eig", m.tol_eig);

  if (j.contains("f_profile")) {
    const json& f = j["f_profile"];
    if (f.is_string()) {
      const std::string name = f.get<std::string>();
      if (name == "unit") {
        m.f = RadialProfile::unit();
      } else if (name == "zero") {
        m.f = RadialProfile::zero();
      } else {
        throw ConfigError("f_profile must be \"unit\", \"zero\" or a table "
                          "of (r, value) pairs");
      }
    } else if (f.is_array()) {
      std::vector<std::pair<double, double>> pts;
      for (const json& p : f) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() ||
            !p[1].is_number())
          throw ConfigError("f_profile table entries must be [r, value]");
        pts.emplace_back(p[0].get<double>(), p[1].get<double>());
      }
      m.f = RadialProfile::table(std::move(pts));
    } else {
      throw ConfigError("f_profile must be a string or a table");
    }
  }

  if (j.contains("riesz")) {
    const json& r = j["riesz"];
    if (!r.is_object()) throw ConfigError("riesz must be an object");
    reject_unknown_keys(r, "riesz", {"radius_factor", "nodes"});
    m.riesz.radius_factor =
        require_number(r, "radius_factor", m.riesz.radius_factor);
    m.riesz.nodes = require_int(r, "nodes", m.riesz.nodes);
  }

  if (j.contains("mode")) {
    const std::string mode = j["mode"].is_string()
                                 ? j["mode"].get<std::string>()
                                 : std::string();
    if (mode == "offdiagonal") {
      config.mode = CouplingMode::OffDiagonal;
    } else if (mode == "diagonal_benchmark") {
      config.mode = CouplingMode::DiagonalBenchmark;
    } else {
      throw ConfigError(
          "mode must be \"offdiagonal\" or \"diagonal_benchmark\"");
    }
  }

  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string())
      throw ConfigError("output_dir must be a string");
    config.output_dir = j["output_dir"].get<std::string>();
  }

  if (j.contains("emit")) {
    if (!j["emit"].is_array()) throw ConfigError("emit must be an array");
    config.emit_csv = false;
    config.emit_json = false;
    for (const json& e : j["emit"]) {
      const std::string v = e.is_string() ? e.get<std::string>() : "";
      if (v == "csv") {
        config.emit_csv = true;
      } else if (v == "json") {
        config.emit_json = true;
      } else {
        throw ConfigError("emit entries must be \"csv\" or \"json\"");
      }
    }
  }

  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    if (!s.is_object()) throw ConfigError("sweep must be an object");
    reject_unknown_keys(s, "sweep", {"param", "values"});
    SweepSpec spec;
    if (!s.contains("param") || !s["param"].is_string())
      throw ConfigError("sweep.param must name a model parameter");
    spec.param = s["param"].get<std::string>();
    if (!s.contains("values") || !s["values"].is_array() ||
        s["values"].empty())
      throw ConfigError("sweep.values must be a nonempty array");
    for (const json& v : s["values"]) {
      if (!v.is_number()) throw ConfigError("sweep.values must be numeric");
      spec.values.push_back(v.get<double>());
    }
    config.sweep = std::move(spec);
  }

  validate(config.model);
  return config;
}

RunConfig load_config(const std::string& path, bool allow_out_of_regime) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), allow_out_of_regime);
}

namespace {

ModelParams with_swept_value(const ModelParams& base, const std::string& name,
                             double value) {
  ModelParams p = base;
  const auto as_int = [&](const char* what) {
    const int i = int(value);
    if (double(i) != value)
      throw ConfigError(std::string(what) + " sweep values must be integers");
    return i;
  };
  if (name == "g") {
    p.g = value;
  } else if (name == "gamma") {
    p.gamma = value;
  } else if (name == "kappa") {
    p.kappa = value;
  } else if (name == "J") {
    p.J = as_int("J");
  } else if (name == "N_max") {
    p.N_max = as_int("N_max");
  } else if (name == "N_scales") {
    p.N_scales = as_int("N_scales");
  } else if (name == "tol_eig") {
    p.tol_eig = value;
  } else {
    throw ConfigError("sweep parameter \"" + name + "\" is not sweepable");
  }
  validate(p);
  return p;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open " + path.string());
  out << text;
  if (!out) throw std::ios_base::failure("write failed for " + path.string());
}

int report_exit_code(const CascadeReport& report) {
  if (report.failure) return kSolverFailure;
  for (const auto& c : report.checks)
    if (!c.pass) return kBoundFailure;
  return kOk;
}

void write_artifacts(const RunConfig& config, const CascadeReport& report,
                     const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  if (config.emit_csv) write_file(dir / "cascade.csv", to_csv(report));
  if (config.emit_json) write_file(dir / "report.json", to_json(report));
}

void print_ledger(const CascadeReport& report, std::ostream& out) {
  std::size_t failed = 0;
  for (const auto& c : report.checks) {
    if (!c.pass) {
      ++failed;
      out << "FAIL  " << c.name << " (n=" << c.scale << "): lhs=" << c.lhs
          << " rhs=" << c.rhs << " slack=" << c.slack << "  [" << c.anchor
          << "]\n";
    }
  }
  out << "checks: " << report.checks.size() - failed << " passed, " << failed
      << " failed\n";
  if (report.e_gs) {
    out << "E_gs = " << format_float(report.e_gs->value)
        << "  (tail bound " << format_float(report.e_gs->error_bound)
        << ", residual " << format_float(report.e_gs->residual_full) << ")\n";
  }
  if (report.failure) out << "cascade failure: " << *report.failure << "\n";
}

}  // namespace

CascadeReport build_report(const RunConfig& config, bool with_truncation) {
  CascadeReport report = config.mode == CouplingMode::OffDiagonal
                             ? run_cascade(config.model)
                             : diagonal_benchmark(config.model);
  if (report.failure) return report;
  if (config.mode == CouplingMode::OffDiagonal) {
    report.checks = verify_bounds(report, config.model);
    const auto probes = probe_checks(report, config.model);
    report.checks.insert(report.checks.end(), probes.begin(), probes.end());
  } else {
    report.checks = diagonal_checks(report);
  }
  if (report.records.size() >= 2) report.e_gs = estimate_Egs(report);
  if (with_truncation) report.truncation = truncation_diagnostics(report);
  return report;
}

unsigned sweep_workers(std::size_t points) {
  unsigned cap = std::thread::hardware_concurrency();
  if (cap == 0) cap = 1;
  if (const char* env = std::getenv("IRFLOW_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) cap = unsigned(v);
  }
  const std::size_t at_least_one = std::max<std::size_t>(points, 1);
  return unsigned(std::min<std::size_t>(cap, at_least_one));
}

namespace {

int execute_single(const RunConfig& config, Verb verb, std::ostream& out) {
  const CascadeReport report = build_report(config);
  if (!config.output_dir.empty() || verb == Verb::Run) {
    const std::filesystem::path dir =
        config.output_dir.empty() ? "." : config.output_dir;
    write_artifacts(config, report, dir);
  }
  print_ledger(report, out);
  return report_exit_code(report);
}

int execute_sweep(const RunConfig& config, std::ostream& out) {
  if (!config.sweep)
    throw ConfigError("sweep requires sweep.param and sweep.values");
  const SweepSpec& spec = *config.sweep;

  // Validate every point before any work starts.
  std::vector<ModelParams> points;
  for (double v : spec.values)
    points.push_back(with_swept_value(config.model, spec.param, v));

  std::vector<CascadeReport> reports(points.size());
  const unsigned workers = sweep_workers(points.size());
  std::vector<std::thread> pool;
  std::atomic<std::size_t> cursor{0};
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = cursor.fetch_add(1);
        if (i >= points.size()) return;
        RunConfig point = config;
        point.model = points[i];
        point.sweep.reset();
        reports[i] = build_report(point);
      }
    });
  }
  for (auto& t : pool) t.join();

  const std::filesystem::path dir =
      config.output_dir.empty() ? "." : config.output_dir;
  std::vector<std::pair<double, CascadeReport>> summary;
  int exit_code = kOk;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const std::string label =
        spec.param + "_" + format_float(spec.values[i]);
    write_artifacts(config, reports[i], dir / label);
    out << "[" << spec.param << " = " << format_float(spec.values[i])
        << "]\n";
    print_ledger(reports[i], out);
    exit_code = std::max(exit_code, report_exit_code(reports[i]));
    summary.emplace_back(spec.values[i], std::move(reports[i]));
  }
  write_file(dir / "summary.csv", sweep_summary_csv(spec.param, summary));
  return exit_code;
}

}  // namespace

int execute(const RunConfig& config, Verb verb, std::ostream& out) {
  try {
    switch (verb) {
      case Verb::Run:
      case Verb::Verify:
        return execute_single(config, verb, out);
      case Verb::Sweep:
        return execute_sweep(config, out);
    }
    return kConfigError;
  } catch (const ConfigError& err) {
    out << "config error: " << err.what() << "\n";
    return kConfigError;
  } catch (const SolverError& err) {
    out << "solver error: " << err.what() << "\n";
    return kSolverFailure;
  } catch (const SizeError& err) {
    out << "size error: " << err.what() << "\n";
    return kSolverFailure;
  } catch (const std::ios_base::failure& err) {
    out << "io error: " << err.what() << "\n";
    return kIoError;
  } catch (const std::filesystem::filesystem_error& err) {
    out << "io error: " << err.what() << "\n";
    return kIoError;
  }
}

}  // namespace irflow::cli
