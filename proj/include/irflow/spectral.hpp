#pragma once

#include <complex>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "irflow/fock.hpp"
#include "irflow/model.hpp"

namespace irflow {

/// Two lowest eigenvalues and the normalized ground vector. The phase is
/// fixed so that the largest-magnitude component of phi0 is real and
/// positive.
struct EigenResult {
  double E0 = 0.0;
  Eigen::VectorXcd phi0;
  double E1 = 0.0;
  double gap = 0.0;
  double residual = 0.0;  // ||H phi0 - E0 phi0||
  std::string method;     // "dense" | "iterative"
};

struct LowestTwoOptions {
  std::size_t dense_threshold = 2000;  // Lanczos above this dimension
  int max_iter = 1000;
  std::optional<Eigen::VectorXcd> start;  // Krylov warm start
};

/// Dense two-lowest for small dimensions, Lanczos with full
/// reorthogonalization plus deflation above. Throws SolverError when the
/// residual tolerance is not reached.
EigenResult lowest_two(const SparseOperator& h, double tol,
                       const LowestTwoOptions& opts = {});

/// Rank-one projector represented by its range vector.
struct ProjectionHandle {
  Eigen::VectorXcd phi;
  std::string space_tag;
};

ProjectionHandle make_projection(Eigen::VectorXcd phi,
                                 const FockBasis& basis);

/// sqrt(1 - |<phi, psi>|^2): the operator norm of the difference of the
/// rank-one projectors onto phi and psi (both unit).
double proj_distance(const Eigen::VectorXcd& phi, const Eigen::VectorXcd& psi);
double proj_distance(const ProjectionHandle& p, const ProjectionHandle& q);

/// Isometric embedding onto the appended-modes vacuum. Accepts vectors on
/// m (x) Fock(small) for any leading factor dimension m (m = 2 for
/// spin-carrying vectors) and returns the coefficients copied onto large
/// states whose appended occupations vanish.
Eigen::VectorXcd embed_vacuum(const Eigen::VectorXcd& phi,
                              const FockBasis& basis_small,
                              const FockBasis& basis_large);

struct RieszOptions {
  double guard_factor = 0.125;       // refuse eigenvalues this close to the
                                     // contour, in units of the radius
  std::size_t guard_dense_cap = 2000;  // spectrum pre-check cap
};

/// Contour quadrature of the resolvent integral around the circle
/// |z - center| = radius with K nodes; approximates the spectral
/// projector onto the enclosed eigenvalues.
Eigen::MatrixXcd riesz_projection(const SparseOperator& h, double center,
                                  double radius, int K,
                                  const RieszOptions& opts = {});

/// Largest singular value of Phi(lambda) (H_ph + rho)^(-1/2) on the
/// truncated space spanned by the shell modes alone.
double field_bound_lhs(const ShellModes& shell, double rho_val,
                       const FockBasis& basis);

struct ResolventNorms {
  double tilde = 0.0;  // || Phi(shell n) (Htilde_n - z)^-1 ||
  double next = 0.0;   // || Phi(shell n) (H_{n+1} - z)^-1 ||
};

struct ResolventOptions {
  double guard = -1.0;           // < 0: default rho(n+1)/16
  std::size_t dense_cap = 4000;  // refuse larger dimensions
};

/// Largest singular values of the shell-coupling/resolvent products on
/// the level-(n+1) space, for z on (or near) the level-(n+1) contour.
ResolventNorms resolvent_coupling_norm(const ModelParams& params, int n,
                                       cxd z, const ResolventOptions& opts = {});

/// Minimum eigenvalue of
///   (H_{n+1} + rho_n) - (H_n (x) 1 + (1 - g)(H_ph(shell n) + rho_n)),
/// which is nonnegative as a quadratic form up to solver tolerance.
double quadratic_form_floor(const ModelParams& params, int n);

/// Same floor with the deepest assembled level standing in for the full
/// Hamiltonian.
double quadratic_form_floor_deep(const ModelParams& params, int n,
                                 int deep_level);

/// x = (H - E)^(-1) (1 - |phi><phi|) b with x orthogonal to phi; phi is
/// the (unit) ground vector of H with eigenvalue E.
Eigen::VectorXcd deflated_solve(const SparseOperator& h, double e,
                                const Eigen::VectorXcd& phi,
                                const Eigen::VectorXcd& b);

namespace detail {
/// Fixes the global phase: largest-magnitude component real positive.
void fix_phase(Eigen::VectorXcd& v);
/// Largest singular value of a dense matrix.
double sigma_max_dense(const Eigen::MatrixXcd& a);
/// Power iteration on A*A for the largest singular value; apply/applyAdj
/// are the actions of A and its adjoint.
double sigma_max_power(
    const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply,
    const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply_adj,
    std::size_t dim, double rel_tol = 1e-10, int max_iter = 100000);
}  // namespace detail

}  // namespace irflow
