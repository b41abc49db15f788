#include "irflow/multiscale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "irflow/oracle.hpp"

namespace irflow {

BoundCheck make_check(std::string name, int scale, double lhs, double rhs,
                      double slack, std::string anchor) {
  BoundCheck c;
  c.name = std::move(name);
  c.scale = scale;
  c.lhs = lhs;
  c.rhs = rhs;
  c.slack = slack;
  c.margin = rhs - lhs;
  c.pass = lhs <= rhs + slack;
  c.anchor = std::move(anchor);
  return c;
}

namespace {

struct LevelSolution {
  double e0 = 0.0;
  double e1 = 0.0;
  double residual = 0.0;
  Eigen::VectorXcd phi;
};

// Merge the per-sector eigenpairs into the global two lowest.
LevelSolution merge_sectors(const EigenResult& plus, const EigenResult& minus) {
  LevelSolution out;
  const bool minus_wins = minus.E0 <= plus.E0;
  const EigenResult& win = minus_wins ? minus : plus;
  const EigenResult& lose = minus_wins ? plus : minus;
  out.e0 = win.E0;
  out.e1 = std::min(win.E1, lose.E0);
  out.residual = win.residual;
  out.phi = win.phi0;
  return out;
}

LevelSolution solve_level(const SparseOperator& h, const FockBasis& basis,
                          CouplingMode mode, double tol,
                          const LowestTwoOptions& opts) {
  if (mode == CouplingMode::OffDiagonal) {
    const SectorLabels labels = parity_labels(basis);
    auto [plus, minus] = sector_solve(h, labels, tol, opts);
    return merge_sectors(plus, minus);
  }
  const EigenResult r = lowest_two(h, tol, opts);
  return {r.E0, r.E1, r.residual, r.phi0};
}

Mat2 coupling_of(CouplingMode mode) {
  return mode == CouplingMode::OffDiagonal ? kSigma1 : kSigma3;
}

CascadeReport run_cascade_impl(const ModelParams& params, CouplingMode mode) {
  validate(params);
  CascadeReport report;
  report.params = params;
  report.mode = mode;
  const Mat2 coupling = coupling_of(mode);

  Eigen::VectorXcd prev_phi;
  FockBasis prev_basis;

  try {
    for (int n = 0; n <= params.N_scales; ++n) {
      const FockBasis basis = level_basis(params, n);
      const SparseOperator h =
          assemble_Hn_with_coupling(params, n, coupling);

      LowestTwoOptions opts;
      std::optional<Eigen::VectorXcd> embedded;
      if (n > 0) {
        embedded = embed_vacuum(prev_phi, prev_basis, basis);
        opts.start = embedded;
      }
      const LevelSolution sol =
          solve_level(h, basis, mode, params.tol_eig, opts);

      ScaleRecord rec;
      rec.n = n;
      rec.rho_n = rho(params, n);
      rec.E_n = sol.e0;
      rec.gap_matrix = sol.e1 - sol.e0;
      rec.gap_n = std::min(rec.gap_matrix, rec.rho_n);
      rec.phi = sol.phi;
      rec.sigma1_elem = std::abs(mode == CouplingMode::OffDiagonal
                                     ? sigma1_expectation(sol.phi)
                                     : sigma3_expectation(sol.phi));
      rec.residual_full = coupling_ball_norm(params, n);

      // One deflated solve for q_n = ||R_n^perp sigma phi_n||.
      Eigen::VectorXcd sigma_phi(sol.phi.size());
      {
        const Eigen::Index f = sol.phi.size() / 2;
        if (mode == CouplingMode::OffDiagonal) {
          sigma_phi.head(f) = sol.phi.tail(f);
          sigma_phi.tail(f) = sol.phi.head(f);
        } else {
          sigma_phi.head(f) = sol.phi.head(f);
          sigma_phi.tail(f) = -sol.phi.tail(f);
        }
      }
      rec.contraction_q =
          deflated_solve(h, sol.e0, sol.phi, sigma_phi).norm();

      // Interpolant with the next shell left free.
      {
        const SparseOperator ht =
            assemble_Htilde_with_coupling(params, n, coupling);
        const FockBasis big = level_basis(params, n + 1);
        LowestTwoOptions topts;
        topts.start = embed_vacuum(sol.phi, basis, big);
        const LevelSolution tsol =
            solve_level(ht, big, mode, params.tol_eig, topts);
        rec.E_tilde = tsol.e0;
        rec.gap_tilde = std::min(tsol.e1 - tsol.e0, rho(params, n + 1));
      }

      if (n > 0) {
        ScaleRecord& prev = report.records.back();
        prev.energy_step = std::abs(sol.e0 - prev.E_n);
        prev.proj_step = proj_distance(sol.phi, *embedded);
        if (mode == CouplingMode::DiagonalBenchmark)
          report.diagonal_oracle[std::size_t(n - 1)].overlap_step_numeric =
              std::abs(sol.phi.dot(*embedded));
      }

      if (mode == CouplingMode::DiagonalBenchmark) {
        DiagonalOracleRow row;
        row.n = n;
        const ModeSet set = build_mode_set(params, n);
        double e = 0.0;
        for (const auto& shell : set.shells)
          for (const auto& node : shell.nodes)
            e -= node.lambda * node.lambda / node.omega;
        row.e_exact = e;
        if (n < params.N_scales) {
          double ov = 1.0;
          for (const auto& node : discretize_shell(params, n).nodes)
            ov *= std::exp(-node.lambda * node.lambda /
                           (2.0 * node.omega * node.omega));
          row.overlap_step_exact = ov;
        }
        report.diagonal_oracle.push_back(row);
      }

      report.records.push_back(std::move(rec));
      prev_phi = sol.phi;
      prev_basis = basis;
    }
  } catch (const SolverError& err) {
    report.failure = err.what();
  } catch (const SizeError& err) {
    report.failure = err.what();
  }
  return report;
}

}  // namespace

CascadeReport run_cascade(const ModelParams& params) {
  return run_cascade_impl(params, CouplingMode::OffDiagonal);
}

CascadeReport diagonal_benchmark(const ModelParams& params) {
  return run_cascade_impl(params, CouplingMode::DiagonalBenchmark);
}

namespace {

// || R_{n+1}^perp (P_n^perp (x) Pvac^perp) sigma1 (P_n (x) Pvac^perp) ||
// on the level-(n+1) space, everything dense.
double chain_operator_norm(const ModelParams& params, const ScaleRecord& here,
                           const ScaleRecord& next) {
  const int n = here.n;
  const FockBasis small = level_basis(params, n);
  const FockBasis big = level_basis(params, n + 1);
  const SparseOperator h = assemble_Hn(params, n + 1);
  const Eigen::Index dim = Eigen::Index(h.dim());
  const Eigen::Index f = Eigen::Index(big.size());

  // Diagonal of 1 (x) Pvac^perp: 1 on states with shell-n photons.
  Eigen::VectorXd t(dim);
  const int old_modes = small.modes();
  for (Eigen::Index i = 0; i < f; ++i) {
    const auto& occ = big.state(std::size_t(i)).occ;
    int appended = 0;
    for (std::size_t m = std::size_t(old_modes); m < occ.size(); ++m)
      appended += occ[m];
    t[i] = appended > 0 ? 1.0 : 0.0;
    t[f + i] = t[i];
  }

  // P_n (x) 1 compressed to the truncated big basis: group the big states
  // by their appended occupation pattern and place phi_n phi_n^dagger in
  // each group.
  Eigen::MatrixXcd pn1 = Eigen::MatrixXcd::Zero(dim, dim);
  std::map<std::vector<int>, std::vector<std::pair<Eigen::Index, std::size_t>>>
      groups;  // appended pattern -> [(big fock index, small fock index)]
  for (std::size_t i = 0; i < big.size(); ++i) {
    const auto& occ = big.state(i).occ;
    std::vector<int> head(occ.begin(), occ.begin() + old_modes);
    std::vector<int> pattern(occ.begin() + old_modes, occ.end());
    const auto small_idx = small.index_of(head);
    if (!small_idx) continue;  // head exceeds the small cap: outside P_n (x) 1
    groups[pattern].push_back({Eigen::Index(i), *small_idx});
  }
  const Eigen::Index fs = Eigen::Index(small.size());
  for (const auto& [pattern, members] : groups) {
    for (const auto& [bi, si] : members)
      for (const auto& [bj, sj] : members)
        for (Eigen::Index s = 0; s < 2; ++s)
          for (Eigen::Index u = 0; u < 2; ++u)
            pn1(s * f + bi, u * f + bj) +=
                here.phi[s * fs + Eigen::Index(si)] *
                std::conj(here.phi[u * fs + Eigen::Index(sj)]);
  }

  Eigen::MatrixXcd s1 = Eigen::MatrixXcd::Zero(dim, dim);
  s1.block(0, f, f, f) = Eigen::MatrixXcd::Identity(f, f);
  s1.block(f, 0, f, f) = Eigen::MatrixXcd::Identity(f, f);

  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
  const Eigen::MatrixXcd tmat = t.cast<cxd>().asDiagonal();
  const Eigen::MatrixXcd b =
      (id - pn1) * tmat * s1 * pn1 * tmat;

  // Deflated resolvent of the next level at its own ground energy.
  Eigen::MatrixXcd a = h.dense();
  a.diagonal().array() -= next.E_n;
  a += next.phi * next.phi.adjoint();
  const Eigen::MatrixXcd pperp = id - next.phi * next.phi.adjoint();
  const Eigen::MatrixXcd rperp = pperp * a.ldlt().solve(pperp);

  return detail::sigma_max_dense(rperp * b);
}

}  // namespace

std::vector<BoundCheck> verify_bounds(const CascadeReport& report,
                                      const ModelParams& params) {
  std::vector<BoundCheck> checks;
  if (report.mode != CouplingMode::OffDiagonal)
    throw ConfigError(
        "verify_bounds: the bound ledger applies to the off-diagonal mode");
  const double g = params.g;
  const double gamma = params.gamma;
  const double tol = params.tol_eig;
  const double energy_slack = 10.0 * tol;
  const double norm_slack = 1e-10;

  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const ScaleRecord& rec = report.records[i];
    const int n = rec.n;
    checks.push_back(make_check(
        "gap-floor", n, 0.5 * rec.rho_n, rec.gap_n, energy_slack,
        "gap(n) >= rho(n)/2"));
    checks.push_back(make_check(
        "gap-tilde-identity", n,
        std::abs(rec.gap_tilde -
                 std::min(rec.gap_n, rho(params, n + 1))),
        0.0, 2.0 * tol, "gap~(n) = min(gap(n), rho(n+1))"));
    checks.push_back(make_check(
        "interpolant-energy", n, std::abs(rec.E_tilde - rec.E_n), 0.0,
        2.0 * tol, "inf spec H~(n) = inf spec H(n)"));

    if (i + 1 >= report.records.size()) continue;
    const ScaleRecord& next = report.records[i + 1];
    checks.push_back(make_check("energy-monotone", n, next.E_n, rec.E_n,
                                energy_slack, "E(n+1) <= E(n)"));
    checks.push_back(make_check("energy-step", n, *rec.energy_step,
                                g * rec.rho_n, 2.0 * energy_slack,
                                "|E(n+1) - E(n)| <= g rho(n)"));
    checks.push_back(make_check(
        "gap-recursion", n,
        std::min(rec.gap_n, (1.0 - g) * rho(params, n + 1)) - g * rec.rho_n,
        next.gap_n, energy_slack,
        "gap(n+1) >= min(gap(n), (1-g) rho(n+1)) - g rho(n)"));

    const double ps = *rec.proj_step;
    checks.push_back(make_check("proj-step-uniform", n, ps, 16.0 * g / gamma,
                                norm_slack, "||P(n+1) - P~(n)|| <= 16 g/gamma"));
    checks.push_back(make_check(
        "proj-step-geometric", n, ps,
        48.0 * g * std::pow(gamma + 147.0 * g, n), norm_slack,
        "||P(n+1) - P~(n)|| <= 48 g (gamma + 147 g)^n"));
    if (gamma <= 0.125)
      checks.push_back(make_check("proj-step-halving", n, ps,
                                  std::pow(0.5, n), norm_slack,
                                  "||P(n+1) - P~(n)|| <= (1/2)^n"));

    // The three-step contraction chain, with every right side measured.
    const double cross = ps;  // ||P(n+1)^perp P~(n)|| equals the distance
                              // for rank-one projections
    checks.push_back(make_check("contraction-chain-split", n, ps,
                                4.0 * cross, norm_slack,
                                "||P(n+1) - P~(n)|| <= 4 ||P(n+1)^perp P~(n)||"));
    const double x = chain_operator_norm(params, rec, next);
    checks.push_back(make_check(
        "contraction-chain-resolvent", n, cross, 2.0 * g * rec.rho_n * x,
        norm_slack,
        "||P(n+1)^perp P~(n)|| <= 2 g rho(n) ||R(n+1)^perp (...) sigma1 (...)||"));
    checks.push_back(make_check(
        "contraction-chain-closed", n, ps,
        48.0 * g * rec.rho_n * rec.contraction_q, norm_slack,
        "||P(n+1) - P~(n)|| <= 48 g rho(n) q(n)"));
    if (n >= 1) {
      const double q_prev = report.records[i - 1].contraction_q;
      checks.push_back(make_check(
          "contraction-growth", n, rec.contraction_q,
          (1.0 + 147.0 * g / gamma) * q_prev, norm_slack,
          "q(n) <= (1 + 147 g/gamma) q(n-1)"));
    }
  }
  return checks;
}

std::vector<BoundCheck> probe_checks(const CascadeReport& report,
                                     const ModelParams& params) {
  std::vector<BoundCheck> checks;
  const double norm_slack = 1e-10;
  const FockBasis shell_basis = enumerate_basis(params.J, params.N_max);

  for (int n = 0; n < params.N_scales; ++n) {
    const double rho_n = rho(params, n);
    const ShellModes shell = discretize_shell(params, n);
    const InteractionNorms norms = interaction_norms(shell);

    const double lhs = field_bound_lhs(shell, rho_n, shell_basis);
    const double rhs_pair =
        2.0 * (norms.weighted + norms.l2 / std::sqrt(rho_n));
    checks.push_back(make_check(
        "field-bound-pair", n, lhs, rhs_pair, norm_slack,
        "||Phi(F)(H_ph + rho)^-1/2|| <= 2(||F/sqrt(w)|| + ||F||/sqrt(rho))"));
    checks.push_back(make_check("field-bound-scale", n, lhs,
                                params.g * std::sqrt(rho_n), norm_slack,
                                "||Phi(F)(H_ph + rho)^-1/2|| <= g sqrt(rho(n))"));

    const double i0 = oracle::shell_integral(params, n, 0);
    const double im1 = oracle::shell_integral(params, n, -1);
    const double scale0 = std::max(std::abs(i0), 1e-300);
    const double scalem1 = std::max(std::abs(im1), 1e-300);
    checks.push_back(make_check(
        "shell-quadrature-l2", n,
        std::abs(norms.l2 * norms.l2 - i0) / scale0, 1e-12, 0.0,
        "sum lambda^2 matches the reference shell integral"));
    checks.push_back(make_check(
        "shell-quadrature-weighted", n,
        std::abs(norms.weighted * norms.weighted - im1) / scalem1, 1e-12, 0.0,
        "sum lambda^2/omega matches the reference shell integral"));
  }

  // Resolvent products on the contour, centered at the measured energies.
  for (int n = 0; n + 1 < int(report.records.size()); ++n) {
    const double radius = rho(params, n + 1) / 8.0;
    const cxd z =
        cxd(report.records[std::size_t(n + 1)].E_n + radius, 0.0);
    const ResolventNorms rn = resolvent_coupling_norm(params, n, z);
    checks.push_back(make_check("resolvent-interpolant", n, rn.tilde,
                                16.0 * params.g / params.gamma, norm_slack,
                                "||Phi(shell n) (H~(n) - z)^-1|| <= 16 g/gamma"));
    checks.push_back(make_check("resolvent-next", n, rn.next,
                                32.0 * params.g / params.gamma, norm_slack,
                                "||Phi(shell n) (H(n+1) - z)^-1|| <= 32 g/gamma"));
  }

  for (int n = 0; n < params.N_scales; ++n) {
    checks.push_back(make_check("form-floor", n,
                                -quadratic_form_floor(params, n), 0.0, 1e-10,
                                "H(n+1) + rho(n) >= H(n) + (1-g)(H_ph~ + rho(n))"));
  }
  for (int n = 0; n < params.N_scales; ++n) {
    checks.push_back(make_check(
        "form-floor-deep", n,
        -quadratic_form_floor_deep(params, n, params.N_scales), 0.0, 1e-10,
        "H + rho(n) >= H(n) + (1-g)(H_ph~ + rho(n)), deepest level standing in"));
  }

  // Contour projector versus the solver ground projector.
  const int riesz_levels = std::min(3, int(report.records.size()) - 1);
  for (int n = 0; n <= riesz_levels; ++n) {
    const ScaleRecord& rec = report.records[std::size_t(n)];
    const double radius = params.riesz.radius_factor * rho(params, n + 1);
    const SparseOperator h = assemble_Hn(params, n);
    const Eigen::MatrixXcd proj =
        riesz_projection(h, rec.E_n, radius, params.riesz.nodes);
    const Eigen::MatrixXcd rank_one = rec.phi * rec.phi.adjoint();
    checks.push_back(make_check(
        "riesz-cross-check", n, detail::sigma_max_dense(proj - rank_one),
        1e-9, 0.0, "contour projector matches |phi(n)><phi(n)|"));
  }
  return checks;
}

std::vector<BoundCheck> diagonal_checks(const CascadeReport& report) {
  std::vector<BoundCheck> checks;
  if (report.mode != CouplingMode::DiagonalBenchmark)
    throw ConfigError("diagonal_checks: report is not a diagonal benchmark");

  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const ScaleRecord& rec = report.records[i];
    const DiagonalOracleRow& row = report.diagonal_oracle[i];
    checks.push_back(make_check("diag-energy-oracle", rec.n,
                                std::abs(rec.E_n - row.e_exact), 1e-10, 0.0,
                                "E(n) = -sum lambda^2/omega exactly"));
    checks.push_back(make_check("diag-spin-element", rec.n,
                                std::abs(rec.sigma1_elem - 1.0), 1e-10, 0.0,
                                "<sigma3> = -1 on the decoupled lower branch"));
    if (row.overlap_step_exact && row.overlap_step_numeric) {
      checks.push_back(make_check(
          "diag-overlap-oracle", rec.n,
          std::abs(*row.overlap_step_numeric - *row.overlap_step_exact),
          1e-10, 0.0,
          "step overlap = prod exp(-lambda^2 / 2 omega^2)"));
    }
  }
  // The infrared catastrophe trend: the cumulative overlap keeps shrinking.
  double cum = 1.0;
  for (std::size_t i = 0; i + 1 < report.records.size(); ++i) {
    const auto& row = report.diagonal_oracle[i];
    if (!row.overlap_step_numeric) continue;
    const double next_cum = cum * *row.overlap_step_numeric;
    checks.push_back(make_check("diag-overlap-decreasing", int(i), next_cum,
                                cum, 0.0,
                                "cumulative ground-state overlap shrinks"));
    // strictly decreasing: require a genuinely positive margin
    checks.back().pass = next_cum < cum;
    cum = next_cum;
  }
  return checks;
}

EgsEstimate estimate_Egs(const CascadeReport& report) {
  if (report.records.size() < 2)
    throw DimensionError("estimate_Egs: need at least two records");
  const ScaleRecord& deepest = report.records.back();
  EgsEstimate est;
  est.value = deepest.E_n;
  est.error_bound = report.params.g * deepest.rho_n /
                    (1.0 - report.params.gamma);
  est.residual_full = deepest.residual_full;
  return est;
}

TruncationDiagnostics truncation_diagnostics(const CascadeReport& base) {
  ModelParams bigger = base.params;
  bigger.N_max = base.params.N_max + 1;
  const CascadeReport ref = base.mode == CouplingMode::OffDiagonal
                                ? run_cascade(bigger)
                                : diagonal_benchmark(bigger);
  if (base.failure || ref.failure)
    throw SolverError("truncation_diagnostics: cascade failed");

  TruncationDiagnostics d;
  d.n_max_ref = bigger.N_max;
  for (std::size_t i = 0; i < base.records.size(); ++i) {
    d.max_energy_delta =
        std::max(d.max_energy_delta,
                 std::abs(base.records[i].E_n - ref.records[i].E_n));
    if (base.records[i].proj_step && ref.records[i].proj_step)
      d.max_proj_delta = std::max(
          d.max_proj_delta,
          std::abs(*base.records[i].proj_step - *ref.records[i].proj_step));
  }
  return d;
}

TruncationDiagnostics truncation_diagnostics(const ModelParams& params,
                                             CouplingMode mode) {
  const CascadeReport base = mode == CouplingMode::OffDiagonal
                                 ? run_cascade(params)
                                 : diagonal_benchmark(params);
  return truncation_diagnostics(base);
}

}  // namespace irflow
