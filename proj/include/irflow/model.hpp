#pragma once

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "irflow/fock.hpp"

namespace irflow {

/// Radial coupling profile, |f(r)| <= 1. Either the constant 1 or a
/// piecewise-linear table over sample points.
class RadialProfile {
 public:
  static RadialProfile unit();
  static RadialProfile zero();
  static RadialProfile table(std::vector<std::pair<double, double>> points);

  double operator()(double r) const { return eval_(r); }
  const std::string& name() const { return name_; }
  const std::vector<std::pair<double, double>>& points() const {
    return points_;
  }

 private:
  RadialProfile(std::string name, std::function<double(double)> eval,
                std::vector<std::pair<double, double>> points = {})
      : name_(std::move(name)),
        eval_(std::move(eval)),
        points_(std::move(points)) {}

  std::string name_;
  std::function<double(double)> eval_;
  std::vector<std::pair<double, double>> points_;
};

struct RieszParams {
  double radius_factor = 0.125;  // contour radius = radius_factor * rho(n+1)
  int nodes = 64;
};

struct ModelParams {
  double g = 0.001;        // coupling strength
  double gamma = 0.1;      // scale ratio, in (0, 1/2)
  double kappa = 0.5;      // UV cutoff, in (0, 1)
  RadialProfile f = RadialProfile::unit();
  int J = 2;               // quadrature nodes per shell
  int N_max = 3;           // total photon cap
  int N_scales = 8;        // cascade depth
  double tol_eig = 1e-11;  // eigensolver residual tolerance
  RieszParams riesz;
  std::size_t basis_budget = FockBasis::kDefaultBudget;
  bool allow_out_of_regime = false;

  /// The reference configuration used throughout the test suite.
  static ModelParams baseline();
};

/// Checks parameter domains, including the smallness hypothesis
/// g < gamma/64 with gamma < 1/2 (skippable via allow_out_of_regime)
/// and |f| <= 1 on a sample grid. Throws ConfigError.
void validate(const ModelParams& params);

/// Infrared scale rho_n = kappa * gamma^n, evaluated as a plain multiply
/// chain so that repeated calls are bitwise identical.
double rho(const ModelParams& params, int n);

/// Quadrature modes for one shell [rho(n+1), rho(n)).
struct ShellModes {
  int n = 0;
  struct Node {
    double omega;   // frequency = radius
    double lambda;  // coupling weight, >= 0
  };
  std::vector<Node> nodes;
};

/// Modes of all shells below the cutoff level, concatenated shell-major.
struct ModeSet {
  std::vector<ShellModes> shells;
  std::vector<std::size_t> offsets;  // shell -> first mode position

  std::size_t mode_count() const;
  std::vector<double> frequencies() const;
  std::vector<cxd> couplings() const;
};

/// Gauss-Legendre nodes on the shell; frequencies are the radii and
/// lambda_j^2 = (g^2 / 4pi) w_j f(r_j)^2 r_j, the radial reduction of the
/// squared coupling density integrated over angles.
ShellModes discretize_shell(const ModelParams& params, int n);

/// Shells 0..n-1; n = 0 yields the empty set (spin-only space).
ModeSet build_mode_set(const ModelParams& params, int n);

/// (l2, weighted) = (sqrt(sum lambda^2), sqrt(sum lambda^2 / omega)).
struct InteractionNorms {
  double l2 = 0.0;
  double weighted = 0.0;
};
InteractionNorms interaction_norms(const ShellModes& shell);

/// L2 norm of the coupling density over the whole ball below rho(n):
/// sqrt((g^2 / 4pi) int_0^rho(n) f(r)^2 r dr). Bounds the residual of the
/// embedded level-n ground vector under any deeper Hamiltonian.
double coupling_ball_norm(const ModelParams& params, int n);

/// Basis used by the level-n operators: C^2 (x) Fock(J*n modes, N_max).
FockBasis level_basis(const ModelParams& params, int n);

using Mat2 = std::array<std::array<cxd, 2>, 2>;
extern const Mat2 kSigma1;
extern const Mat2 kSigma3;
extern const Mat2 kHat;  // diag(2, 0): excited level 2, ground level 0

/// Kronecker product of a 2x2 spin matrix with a Fock-space operator.
/// Index convention: global = spin * fock_dim + fock_index, spin 0 = up.
SparseOperator spin_tensor(const Mat2& spin, const SparseOperator& fock_op);

/// Cutoff Hamiltonian H_n = H_at + sigma1 (x) Phi(lambda) + 1 (x) H_ph on
/// C^2 (x) Fock(J*n, N_max). For n = 0 this is diag(2, 0).
SparseOperator assemble_Hn(const ModelParams& params, int n);

/// Same as assemble_Hn but with an arbitrary spin coupling matrix in
/// place of sigma1 (used by the diagonal benchmark).
SparseOperator assemble_Hn_with_coupling(const ModelParams& params, int n,
                                         const Mat2& coupling);

/// Interpolant on the level-(n+1) space: level-n couplings plus the
/// shell-n modes left free. Its ground energy equals that of H_n.
SparseOperator assemble_Htilde(const ModelParams& params, int n);
SparseOperator assemble_Htilde_with_coupling(const ModelParams& params, int n,
                                             const Mat2& coupling);

/// The single-shell interaction sigma1 (x) Phi(shell-n lambdas) on the
/// level-(n+1) space; equals assemble_Hn(n+1) - assemble_Htilde(n).
SparseOperator coupling_step(const ModelParams& params, int n);

/// Free energy of the shell-n modes, 1 (x) H_ph(omega tilde), on the
/// level-host space (host > n; default the adjacent level).
SparseOperator shell_free_field(const ModelParams& params, int n,
                                int host_level);
SparseOperator shell_free_field(const ModelParams& params, int n);

/// H_n (x) 1 embedded on the level-host space: shells below n coupled,
/// shells n..host-1 removed entirely (no frequency, no coupling).
SparseOperator assemble_embedded_Hn(const ModelParams& params, int n,
                                    int host_level);

namespace detail {
/// Gauss-Legendre rule on [a, b] via the symmetric tridiagonal (Jacobi
/// matrix) eigenproblem.
void gauss_legendre(int n, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights);
}  // namespace detail

}  // namespace irflow
