#pragma once

#include <optional>
#include <string>
#include <vector>

#include "irflow/multiscale.hpp"

namespace irflow::cli {

enum class Verb { Run, Verify, Sweep };

struct SweepSpec {
  std::string param;
  std::vector<double> values;
};

struct RunConfig {
  ModelParams model;
  std::string output_dir;
  bool emit_csv = true;
  bool emit_json = true;
  CouplingMode mode = CouplingMode::OffDiagonal;
  std::optional<SweepSpec> sweep;
};

/// Exit status contract shared by every subcommand.
enum ExitCode {
  kOk = 0,
  kIoError = 1,
  kBoundFailure = 2,
  kSolverFailure = 3,
  kConfigError = 4,
};

/// Strict JSON parse: unknown keys are rejected, domains validated, the
/// smallness hypothesis enforced unless allow_out_of_regime.
RunConfig parse_config(const std::string& json_text,
                       bool allow_out_of_regime = false);

RunConfig load_config(const std::string& path,
                      bool allow_out_of_regime = false);

/// Builds the cascade report for a config: records, resolved checks,
/// ground-state estimate and truncation diagnostics.
CascadeReport build_report(const RunConfig& config,
                           bool with_truncation = true);

/// Dispatches a subcommand; writes artifacts under config.output_dir and
/// returns an ExitCode value.
int execute(const RunConfig& config, Verb verb, std::ostream& out);

/// Worker cap for sweep points: IRFLOW_THREADS when set, otherwise the
/// hardware concurrency.
unsigned sweep_workers(std::size_t points);

}  // namespace irflow::cli
