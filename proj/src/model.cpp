#include "irflow/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace irflow {

RadialProfile RadialProfile::unit() {
  return RadialProfile("unit", [](double) { return 1.0; });
}

RadialProfile RadialProfile::zero() {
  return RadialProfile("zero", [](double) { return 0.0; });
}

RadialProfile RadialProfile::table(
    std::vector<std::pair<double, double>> points) {
  if (points.empty())
    throw ConfigError("f_profile table needs at least one point");
  std::sort(points.begin(), points.end());
  for (std::size_t i = 1; i < points.size(); ++i)
    if (points[i].first == points[i - 1].first)
      throw ConfigError("f_profile table has duplicate radii");
  auto eval = [pts = points](double r) {
    if (r <= pts.front().first) return pts.front().second;
    if (r >= pts.back().first) return pts.back().second;
    auto hi = std::upper_bound(pts.begin(), pts.end(), r,
                               [](double x, const auto& p) { return x < p.first; });
    auto lo = hi - 1;
    const double t = (r - lo->first) / (hi->first - lo->first);
    return lo->second + t * (hi->second - lo->second);
  };
  return RadialProfile("table", std::move(eval), std::move(points));
}

ModelParams ModelParams::baseline() {
  ModelParams p;
  p.g = 0.001;
  p.gamma = 0.1;
  p.kappa = 0.5;
  p.f = RadialProfile::unit();
  p.J = 1;
  p.N_max = 3;
  p.N_scales = 8;
  p.tol_eig = 1e-11;
  return p;
}

void validate(const ModelParams& params) {
  if (!(params.gamma > 0.0 && params.gamma < 1.0))
    throw ConfigError("gamma must lie in (0, 1)");
  if (!(params.kappa > 0.0 && params.kappa < 1.0))
    throw ConfigError("kappa must lie in (0, 1)");
  if (!(params.g >= 0.0)) throw ConfigError("g must be >= 0");
  if (params.J < 1) throw ConfigError("J must be >= 1");
  if (params.N_max < 0) throw ConfigError("N_max must be >= 0");
  if (params.N_scales < 0) throw ConfigError("N_scales must be >= 0");
  if (!(params.tol_eig > 0.0)) throw ConfigError("tol_eig must be > 0");
  if (params.riesz.nodes < 4) throw ConfigError("riesz.nodes must be >= 4");
  if (!(params.riesz.radius_factor > 0.0))
    throw ConfigError("riesz.radius_factor must be > 0");

  if (!params.allow_out_of_regime) {
    if (!(params.gamma < 0.5))
      throw ConfigError(
          "gamma violates the smallness hypothesis gamma < 1/2 "
          "(pass allow_out_of_regime to explore anyway)");
    if (!(params.g < params.gamma / 64.0))
      throw ConfigError(
          "g violates the smallness hypothesis \"g < 1/64 gamma\" "
          "(pass allow_out_of_regime to explore anyway)");
  }

  // |f| <= 1 on a sample grid over the coupled range.
  const int samples = 257;
  for (int i = 0; i < samples; ++i) {
    const double r = params.kappa * double(i) / double(samples - 1);
    if (std::abs(params.f(r)) > 1.0 + 1e-12)
      throw ConfigError("f_profile exceeds 1 in magnitude at r = " +
                        std::to_string(r));
  }
}

double rho(const ModelParams& params, int n) {
  double r = params.kappa;
  for (int i = 0; i < n; ++i) r *= params.gamma;
  return r;
}

namespace detail {

void gauss_legendre(int n, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  if (n < 1) throw ConfigError("gauss_legendre: need at least one node");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub = Eigen::VectorXd::Zero(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k)
    sub[k - 1] = double(k) / std::sqrt(4.0 * k * k - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  nodes.resize(std::size_t(n));
  weights.resize(std::size_t(n));
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  for (int k = 0; k < n; ++k) {
    nodes[std::size_t(k)] = mid + half * solver.eigenvalues()[k];
    const double v0 = solver.eigenvectors()(0, k);
    weights[std::size_t(k)] = 2.0 * v0 * v0 * half;
  }
}

}  // namespace detail

ShellModes discretize_shell(const ModelParams& params, int n) {
  if (params.J < 1) throw ConfigError("discretize_shell: J must be >= 1");
  const double lo = rho(params, n + 1);
  const double hi = rho(params, n);
  std::vector<double> r, w;
  detail::gauss_legendre(params.J, lo, hi, r, w);

  ShellModes shell;
  shell.n = n;
  shell.nodes.reserve(std::size_t(params.J));
  const double pref = params.g * params.g / (4.0 * std::numbers::pi);
  for (int j = 0; j < params.J; ++j) {
    const double rj = r[std::size_t(j)];
    if (!(rj >= lo && rj <= hi))
      throw SolverError("discretize_shell: quadrature node escaped the shell");
    const double fj = params.f(rj);
    const double lam2 = pref * w[std::size_t(j)] * fj * fj * rj;
    shell.nodes.push_back({rj, std::sqrt(lam2)});
  }
  return shell;
}

std::size_t ModeSet::mode_count() const {
  std::size_t m = 0;
  for (const auto& s : shells) m += s.nodes.size();
  return m;
}

std::vector<double> ModeSet::frequencies() const {
  std::vector<double> f;
  f.reserve(mode_count());
  for (const auto& s : shells)
    for (const auto& node : s.nodes) f.push_back(node.omega);
  return f;
}

std::vector<cxd> ModeSet::couplings() const {
  std::vector<cxd> c;
  c.reserve(mode_count());
  for (const auto& s : shells)
    for (const auto& node : s.nodes) c.emplace_back(node.lambda, 0.0);
  return c;
}

ModeSet build_mode_set(const ModelParams& params, int n) {
  ModeSet set;
  std::size_t offset = 0;
  for (int shell = 0; shell < n; ++shell) {
    set.offsets.push_back(offset);
    set.shells.push_back(discretize_shell(params, shell));
    offset += set.shells.back().nodes.size();
  }
  return set;
}

double coupling_ball_norm(const ModelParams& params, int n) {
  std::vector<double> r, w;
  detail::gauss_legendre(48, 0.0, rho(params, n), r, w);
  double sum = 0.0;
  for (std::size_t j = 0; j < r.size(); ++j) {
    const double f = params.f(r[j]);
    sum += w[j] * f * f * r[j];
  }
  return params.g *
         std::sqrt(sum / (4.0 * std::numbers::pi));
}

InteractionNorms interaction_norms(const ShellModes& shell) {
  double sum2 = 0.0;
  double sum2w = 0.0;
  for (const auto& node : shell.nodes) {
    sum2 += node.lambda * node.lambda;
    sum2w += node.lambda * node.lambda / node.omega;
  }
  return {std::sqrt(sum2), std::sqrt(sum2w)};
}

FockBasis level_basis(const ModelParams& params, int n) {
  return enumerate_basis(params.J * n, params.N_max, params.basis_budget);
}

const Mat2 kSigma1 = {{{cxd(0, 0), cxd(1, 0)}, {cxd(1, 0), cxd(0, 0)}}};
const Mat2 kSigma3 = {{{cxd(1, 0), cxd(0, 0)}, {cxd(0, 0), cxd(-1, 0)}}};
const Mat2 kHat = {{{cxd(2, 0), cxd(0, 0)}, {cxd(0, 0), cxd(0, 0)}}};

SparseOperator spin_tensor(const Mat2& spin, const SparseOperator& fock_op) {
  const std::size_t f = fock_op.dim();
  SparseBuilder builder(2 * f);
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t t = 0; t < 2; ++t) {
      const cxd c = spin[s][t];
      if (c == cxd(0.0, 0.0)) continue;
      for (const auto& e : fock_op.entries())
        builder.add(s * f + e.row, t * f + e.col, c * e.value);
    }
  return builder.build(false);
}

namespace {

SparseOperator identity_fock(std::size_t dim) {
  SparseBuilder builder(dim);
  for (std::size_t i = 0; i < dim; ++i) builder.add(i, i, cxd(1.0, 0.0));
  return builder.build(true);
}

const Mat2 kSpinId = {{{cxd(1, 0), cxd(0, 0)}, {cxd(0, 0), cxd(1, 0)}}};

SparseOperator assemble(const FockBasis& basis, const Mat2& coupling,
                        const std::vector<double>& freqs,
                        const std::vector<cxd>& lambdas) {
  SparseOperator h = spin_tensor(kHat, identity_fock(basis.size()));
  if (basis.modes() > 0) {
    h = h + spin_tensor(coupling, field_matrix(basis, lambdas));
    h = h + spin_tensor(kSpinId, detail::weighted_number_diag(basis, freqs));
  }
  // Entries are real and symmetric by construction.
  return SparseOperator(h.dim(), h.entries(), true);
}

}  // namespace

SparseOperator assemble_Hn_with_coupling(const ModelParams& params, int n,
                                         const Mat2& coupling) {
  const ModeSet set = build_mode_set(params, n);
  const FockBasis basis = level_basis(params, n);
  return assemble(basis, coupling, set.frequencies(), set.couplings());
}

SparseOperator assemble_Hn(const ModelParams& params, int n) {
  return assemble_Hn_with_coupling(params, n, kSigma1);
}

SparseOperator assemble_Htilde_with_coupling(const ModelParams& params, int n,
                                             const Mat2& coupling) {
  const ModeSet set = build_mode_set(params, n + 1);
  const FockBasis basis = level_basis(params, n + 1);
  std::vector<cxd> lambdas = set.couplings();
  // Shell n stays free: zero its couplings, keep its frequencies.
  for (std::size_t m = set.offsets[std::size_t(n)]; m < lambdas.size(); ++m)
    lambdas[m] = cxd(0.0, 0.0);
  return assemble(basis, coupling, set.frequencies(), lambdas);
}

SparseOperator assemble_Htilde(const ModelParams& params, int n) {
  return assemble_Htilde_with_coupling(params, n, kSigma1);
}

SparseOperator coupling_step(const ModelParams& params, int n) {
  const ModeSet set = build_mode_set(params, n + 1);
  const FockBasis basis = level_basis(params, n + 1);
  std::vector<cxd> lambdas(set.mode_count(), cxd(0.0, 0.0));
  const auto& shell = set.shells[std::size_t(n)];
  const std::size_t off = set.offsets[std::size_t(n)];
  for (std::size_t j = 0; j < shell.nodes.size(); ++j)
    lambdas[off + j] = cxd(shell.nodes[j].lambda, 0.0);
  return spin_tensor(kSigma1, field_matrix(basis, lambdas));
}

SparseOperator shell_free_field(const ModelParams& params, int n,
                                int host_level) {
  if (host_level <= n)
    throw DimensionError("shell_free_field: host level must exceed the shell");
  const ModeSet set = build_mode_set(params, host_level);
  const FockBasis basis = level_basis(params, host_level);
  std::vector<double> freqs(set.mode_count(), 0.0);
  const auto& shell = set.shells[std::size_t(n)];
  const std::size_t off = set.offsets[std::size_t(n)];
  for (std::size_t j = 0; j < shell.nodes.size(); ++j)
    freqs[off + j] = shell.nodes[j].omega;
  return spin_tensor(kSpinId, detail::weighted_number_diag(basis, freqs));
}

SparseOperator shell_free_field(const ModelParams& params, int n) {
  return shell_free_field(params, n, n + 1);
}

SparseOperator assemble_embedded_Hn(const ModelParams& params, int n,
                                    int host_level) {
  if (host_level < n)
    throw DimensionError("assemble_embedded_Hn: host level below cutoff");
  const ModeSet set = build_mode_set(params, host_level);
  const FockBasis basis = level_basis(params, host_level);
  std::vector<double> freqs = set.frequencies();
  std::vector<cxd> lambdas = set.couplings();
  const std::size_t keep =
      n < host_level ? set.offsets[std::size_t(n)] : set.mode_count();
  for (std::size_t m = keep; m < set.mode_count(); ++m) {
    freqs[m] = 0.0;
    lambdas[m] = cxd(0.0, 0.0);
  }
  return assemble(basis, kSigma1, freqs, lambdas);
}

}  // namespace irflow
