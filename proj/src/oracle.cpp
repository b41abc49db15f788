#include "irflow/oracle.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace irflow::oracle {

std::vector<double> dense_spectrum(const SparseOperator& h,
                                   const OracleConfig& cfg) {
  const std::size_t dim = h.dim();
  if (dim > std::size_t(cfg.dense_dim_cap))
    throw SizeError("dense_spectrum: dimension " + std::to_string(dim) +
                        " exceeds the dense oracle cap " +
                        std::to_string(cfg.dense_dim_cap),
                    double(dim));

  // Column-major Hermitian matrix for zheev.
  std::vector<std::complex<double>> a(dim * dim, 0.0);
  for (const auto& e : h.entries()) a[e.col * dim + e.row] = e.value;
  std::vector<double> evals(dim, 0.0);
  const lapack_int info =
      LAPACKE_zheev(LAPACK_COL_MAJOR, 'N', 'L', lapack_int(dim), a.data(),
                    lapack_int(dim), evals.data());
  if (info != 0)
    throw SolverError("dense_spectrum: zheev failed with info = " +
                      std::to_string(info));
  return evals;
}

namespace detail {

void gauss_legendre_newton(int n, double a, double b,
                           std::vector<double>& nodes,
                           std::vector<double>& weights) {
  nodes.resize(std::size_t(n));
  weights.resize(std::size_t(n));
  const int m = (n + 1) / 2;
  const double mid = 0.5 * (b + a);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p0 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    nodes[std::size_t(i)] = mid - half * z;
    nodes[std::size_t(n - 1 - i)] = mid + half * z;
    const double w = 2.0 * half / ((1.0 - z * z) * pp * pp);
    weights[std::size_t(i)] = w;
    weights[std::size_t(n - 1 - i)] = w;
  }
}

}  // namespace detail

namespace {

double radial_integral(const ModelParams& params, double lo, double hi,
                       int moment, int quad_nodes) {
  std::vector<double> r, w;
  detail::gauss_legendre_newton(quad_nodes, lo, hi, r, w);
  double sum = 0.0;
  for (std::size_t j = 0; j < r.size(); ++j) {
    const double f = params.f(r[j]);
    sum += w[j] * f * f * std::pow(r[j], 1.0 + moment);
  }
  return params.g * params.g / (4.0 * std::numbers::pi) * sum;
}

}  // namespace

double shell_integral(const ModelParams& params, int n, int moment,
                      const OracleConfig& cfg) {
  if (moment < -1 || moment > 1)
    throw ConfigError("shell_integral: moment must be -1, 0 or +1");
  if (cfg.quad_nodes < 16)
    throw ConfigError("shell_integral: quad_nodes must be >= 16");
  return radial_integral(params, rho(params, n + 1), rho(params, n), moment,
                         cfg.quad_nodes);
}

double ball_integral(const ModelParams& params, int n,
                     const OracleConfig& cfg) {
  if (cfg.quad_nodes < 16)
    throw ConfigError("ball_integral: quad_nodes must be >= 16");
  return radial_integral(params, 0.0, rho(params, n), 0, cfg.quad_nodes);
}

double perturbative_E(const ModelParams& params, int n) {
  const ModeSet set = build_mode_set(params, n);
  double e = 0.0;
  for (const auto& shell : set.shells)
    for (const auto& node : shell.nodes)
      e -= node.lambda * node.lambda / (2.0 + node.omega);
  return e;
}

}  // namespace irflow::oracle
