#pragma once

#include <vector>

#include "irflow/fock.hpp"
#include "irflow/model.hpp"

namespace irflow::oracle {

/// Reference-implementation knobs. The oracles deliberately share no code
/// with the primary paths they cross-check: the eigensolver goes through
/// LAPACK and the quadrature nodes come from Newton iteration on the
/// Legendre recurrence.
struct OracleConfig {
  int quad_nodes = 64;      // nodes per shell for reference integrals
  int dense_dim_cap = 4000; // largest dimension the dense oracle accepts
};

/// Full real spectrum in ascending order via LAPACK (zheev).
std::vector<double> dense_spectrum(const SparseOperator& h,
                                   const OracleConfig& cfg = {});

/// Reference value of the squared-coupling shell integral
///   (g^2 / 4pi) * int_{rho(n+1)}^{rho(n)} f(r)^2 r^(1+moment) dr
/// for moment in {-1, 0, +1}.
double shell_integral(const ModelParams& params, int n, int moment,
                      const OracleConfig& cfg = {});

/// Same integrand over the whole ball [0, rho(n)] at moment 0; the square
/// root of this value bounds the residual of the embedded level-n ground
/// vector under the full Hamiltonian.
double ball_integral(const ModelParams& params, int n,
                     const OracleConfig& cfg = {});

/// Second-order ground-energy estimate -sum_j lambda_j^2 / (2 + omega_j)
/// over all modes coupled at cutoff level n.
double perturbative_E(const ModelParams& params, int n);

namespace detail {
/// Gauss-Legendre rule on [a, b] via Newton iteration on P_n.
void gauss_legendre_newton(int n, double a, double b,
                           std::vector<double>& nodes,
                           std::vector<double>& weights);
}  // namespace detail

}  // namespace irflow::oracle
