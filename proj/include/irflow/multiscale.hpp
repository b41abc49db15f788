#pragma once

#include <optional>
#include <string>
#include <vector>

#include "irflow/model.hpp"
#include "irflow/spectral.hpp"
#include "irflow/symmetry.hpp"

namespace irflow {

enum class CouplingMode { OffDiagonal, DiagonalBenchmark };

/// Everything measured at one cutoff level. Gaps are reported relative to
/// the full model: a free photon of any energy down to rho_n could be
/// appended to the ground state, so the recorded gap is the solver gap
/// capped at rho_n (and the interpolant gap capped at rho_{n+1}).
struct ScaleRecord {
  int n = 0;
  double rho_n = 0.0;
  double E_n = 0.0;
  double gap_n = 0.0;      // min(gap_matrix, rho_n)
  double gap_matrix = 0.0; // raw solver gap of the assembled level
  double gap_tilde = 0.0;  // min(interpolant solver gap, rho_{n+1})
  double E_tilde = 0.0;    // interpolant ground energy; equals E_n
  std::optional<double> energy_step;  // |E_{n+1} - E_n|
  std::optional<double> proj_step;    // distance of embedded projections
  double contraction_q = 0.0;  // ||(H_n - E_n)^-1 (1 - P_n) sigma phi_n||
  // |<phi_n, (sigma1 (x) 1) phi_n>|; the diagonal benchmark stores the
  // sigma3 analog here.
  double sigma1_elem = 0.0;
  double residual_full = 0.0;  // coupling_ball_norm at this level
  Eigen::VectorXcd phi;        // ground vector on the level-n space
};

/// One verified inequality: pass iff lhs <= rhs + slack.
struct BoundCheck {
  std::string name;
  int scale = -1;  // -1 for global checks
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double margin = 0.0;  // rhs - lhs
  bool pass = false;
  std::string anchor;  // the inequality being instantiated
};

BoundCheck make_check(std::string name, int scale, double lhs, double rhs,
                      double slack, std::string anchor);

struct DiagonalOracleRow {
  int n = 0;
  double e_exact = 0.0;  // -sum lambda^2 / omega over the level's modes
  // Product over shell-n modes of exp(-lambda^2 / (2 omega^2)); the exact
  // overlap lost in the step n -> n+1. Unset on the deepest row.
  std::optional<double> overlap_step_exact;
  std::optional<double> overlap_step_numeric;
};

struct EgsEstimate {
  double value = 0.0;         // deepest E_n
  double error_bound = 0.0;   // geometric tail g rho_N / (1 - gamma)
  double residual_full = 0.0; // coupling_ball_norm at the deepest level
};

struct TruncationDiagnostics {
  int n_max_ref = 0;          // the increased cap used for the rerun
  double max_energy_delta = 0.0;
  double max_proj_delta = 0.0;
};

struct CascadeReport {
  ModelParams params;
  CouplingMode mode = CouplingMode::OffDiagonal;
  std::vector<ScaleRecord> records;
  std::vector<BoundCheck> checks;
  std::optional<EgsEstimate> e_gs;
  std::vector<DiagonalOracleRow> diagonal_oracle;
  std::optional<TruncationDiagnostics> truncation;
  std::optional<std::string> failure;
};

/// Drives the multiscale construction for n = 0..N_scales with the
/// off-diagonal coupling: sector-restricted solves warm-started from the
/// embedded previous ground vector, per-level records, deterministic
/// across runs. Solver and budget failures yield a partial report with
/// the failure field set.
CascadeReport run_cascade(const ModelParams& params);

/// The exactly solvable contrast: same cascade with the diagonal spin
/// coupling, plus closed-form coherent-shift oracle rows.
CascadeReport diagonal_benchmark(const ModelParams& params);

/// The record-derived bound ledger (energy steps, gap floor and
/// recursion, projection contraction chain). Never mutates the records.
std::vector<BoundCheck> verify_bounds(const CascadeReport& report,
                                      const ModelParams& params);

/// Spectral probes that need fresh assembly: the field-operator bound per
/// shell with oracle quadrature agreement, the resolvent-coupling norms
/// on the contour, quadratic-form floors, and the contour-projector
/// cross-check at shallow levels.
std::vector<BoundCheck> probe_checks(const CascadeReport& report,
                                     const ModelParams& params);

/// Oracle-match and vanishing-overlap checks for the diagonal contrast.
std::vector<BoundCheck> diagonal_checks(const CascadeReport& report);

/// Deepest energy with the geometric tail bound; needs >= 2 records.
EgsEstimate estimate_Egs(const CascadeReport& report);

/// Reruns the cascade with N_max + 1 and reports the worst shifts.
TruncationDiagnostics truncation_diagnostics(const ModelParams& params,
                                             CouplingMode mode);
/// Same, reusing an already computed base-cap report.
TruncationDiagnostics truncation_diagnostics(const CascadeReport& base);

}  // namespace irflow
