#include "irflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

namespace irflow {

namespace detail {

void fix_phase(Eigen::VectorXcd& v) {
  Eigen::Index imax = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best) {
      best = a;
      imax = i;
    }
  }
  if (best <= 0.0) return;
  v *= std::conj(v[imax]) / best;
}

double sigma_max_dense(const Eigen::MatrixXcd& a) {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
  return svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
}

double sigma_max_power(
    const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply,
    const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply_adj,
    std::size_t dim, double rel_tol, int max_iter) {
  std::mt19937 gen(0x5eed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const Eigen::Index n = Eigen::Index(dim);
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cxd(dist(gen), 0.0);
  v.normalize();

  double prev = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXcd w = apply_adj(apply(v));
    const double s2 = std::real(v.dot(w));
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
    if (it > 0 && std::abs(s2 - prev) <= rel_tol * std::max(s2, 1e-300))
      return std::sqrt(std::max(s2, 0.0));
    prev = s2;
  }
  throw SolverError("sigma_max_power: no convergence after " +
                    std::to_string(max_iter) + " iterations");
}

}  // namespace detail

namespace {

Eigen::VectorXcd seeded_vector(std::size_t dim) {
  std::mt19937 gen(0x1bf52);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const Eigen::Index n = Eigen::Index(dim);
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cxd(dist(gen), 0.0);
  v.normalize();
  return v;
}

struct RitzPair {
  double value = 0.0;
  Eigen::VectorXcd vector;
};

// Lanczos with full reorthogonalization against both the Krylov basis and
// the deflation set; returns the lowest Ritz pair once its residual
// estimate passes tol.
RitzPair lanczos_lowest(const SparseOperator& h,
                        const std::vector<Eigen::VectorXcd>& deflate,
                        Eigen::VectorXcd v0, double tol, int max_iter) {
  const auto project_out = [&](Eigen::VectorXcd& w) {
    for (const auto& d : deflate) w -= d * d.dot(w);
  };

  project_out(v0);
  if (v0.norm() < 1e-12) v0 = seeded_vector(std::size_t(h.dim()));
  project_out(v0);
  v0.normalize();

  std::vector<Eigen::VectorXcd> basis{v0};
  std::vector<double> alpha, beta;

  for (int k = 0; k < max_iter; ++k) {
    Eigen::VectorXcd w = h.apply(basis.back());
    if (k > 0) w -= beta.back() * basis[basis.size() - 2];
    const double a = std::real(basis.back().dot(w));
    alpha.push_back(a);
    w -= a * basis.back();
    // Two reorthogonalization sweeps keep the basis orthonormal to
    // machine precision.
    for (int sweep = 0; sweep < 2; ++sweep) {
      project_out(w);
      for (const auto& u : basis) w -= u * u.dot(w);
    }
    const double b = w.norm();

    const int m = int(alpha.size());
    const bool last = b < 1e-14 || m == int(h.dim()) || k + 1 == max_iter;
    if (last || m % 4 == 0) {
      Eigen::VectorXd diag = Eigen::VectorXd::Map(alpha.data(), m);
      Eigen::VectorXd sub = Eigen::VectorXd::Zero(std::max(m - 1, 0));
      for (int i = 0; i + 1 < m; ++i) sub[i] = beta[std::size_t(i)];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      const double theta = tri.eigenvalues()[0];
      const double resid_est = b * std::abs(tri.eigenvectors()(m - 1, 0));

      if (resid_est <= 0.5 * tol || last) {
        Eigen::VectorXcd x = Eigen::VectorXcd::Zero(Eigen::Index(h.dim()));
        for (int i = 0; i < m; ++i)
          x += tri.eigenvectors()(i, 0) * basis[std::size_t(i)];
        project_out(x);
        x.normalize();
        return {theta, x};
      }
    }
    beta.push_back(b);
    basis.push_back(w / b);
  }
  throw SolverError("lowest_two: Lanczos did not converge after " +
                    std::to_string(max_iter) + " iterations");
}

// One inverse-iteration pass: scrubs the O(eps ||H|| / gap) noise the
// eigensolver leaves in soft directions, which would otherwise dominate
// projection distances at deep scales. Falls back to the input when the
// shifted solve degenerates (exactly singular shift).
void refine_ground(const SparseOperator& h, double& e0,
                   Eigen::VectorXcd& phi) {
  if (h.dim() > 4000) return;  // dense shifted solve only at desk scale
  Eigen::MatrixXcd a = h.dense();
  a.diagonal().array() -= e0;
  const Eigen::VectorXcd w = a.partialPivLu().solve(phi);
  const double nw = w.norm();
  if (!std::isfinite(nw) || nw == 0.0) return;
  Eigen::VectorXcd refined = w / nw;
  const double rayleigh = std::real(refined.dot(h.apply(refined)));
  phi = refined;
  e0 = rayleigh;
}

EigenResult lowest_two_dense(const SparseOperator& h, double tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.dense());
  if (solver.info() != Eigen::Success)
    throw SolverError("lowest_two: dense eigensolver failed");
  EigenResult r;
  r.E0 = solver.eigenvalues()[0];
  r.E1 = solver.eigenvalues()[1];
  r.phi0 = solver.eigenvectors().col(0);
  refine_ground(h, r.E0, r.phi0);
  r.gap = r.E1 - r.E0;
  detail::fix_phase(r.phi0);
  r.phi0.normalize();
  r.residual = (h.apply(r.phi0) - r.E0 * r.phi0).norm();
  r.method = "dense";
  if (r.residual > tol)
    throw SolverError("lowest_two: dense residual " +
                      std::to_string(r.residual) + " exceeds tolerance " +
                      std::to_string(tol));
  return r;
}

}  // namespace

EigenResult lowest_two(const SparseOperator& h, double tol,
                       const LowestTwoOptions& opts) {
  if (h.dim() < 2)
    throw DimensionError("lowest_two: need dimension >= 2");
  if (!h.hermitian())
    throw DimensionError("lowest_two: operator must be Hermitian");
  if (h.dim() <= opts.dense_threshold) return lowest_two_dense(h, tol);

  Eigen::VectorXcd start = opts.start && opts.start->size() == Eigen::Index(h.dim())
                               ? *opts.start
                               : seeded_vector(h.dim());
  RitzPair ground = lanczos_lowest(h, {}, start, tol, opts.max_iter);
  refine_ground(h, ground.value, ground.vector);
  RitzPair excited =
      lanczos_lowest(h, {ground.vector}, seeded_vector(h.dim()), tol,
                     opts.max_iter);

  EigenResult r;
  r.E0 = ground.value;
  r.E1 = excited.value;
  r.gap = std::max(r.E1 - r.E0, 0.0);
  r.phi0 = ground.vector;
  detail::fix_phase(r.phi0);
  r.phi0.normalize();
  r.residual = (h.apply(r.phi0) - r.E0 * r.phi0).norm();
  r.method = "iterative";
  if (r.residual > tol)
    throw SolverError("lowest_two: iterative residual " +
                      std::to_string(r.residual) + " exceeds tolerance " +
                      std::to_string(tol));
  return r;
}

ProjectionHandle make_projection(Eigen::VectorXcd phi,
                                 const FockBasis& basis) {
  return {std::move(phi), "M" + std::to_string(basis.modes()) + "N" +
                              std::to_string(basis.nmax())};
}

double proj_distance(const Eigen::VectorXcd& phi,
                     const Eigen::VectorXcd& psi) {
  if (phi.size() != psi.size())
    throw DimensionError("proj_distance: dimension mismatch");
  if (std::abs(phi.norm() - 1.0) > 1e-8 || std::abs(psi.norm() - 1.0) > 1e-8)
    throw DimensionError("proj_distance: vectors must be unit");
  // sqrt(1 - |<phi,psi>|^2) evaluated as the orthogonal-residual norm,
  // which keeps full precision for nearly parallel vectors; the min is
  // symmetric in the arguments.
  const double r1 = (phi - psi * psi.dot(phi)).norm();
  const double r2 = (psi - phi * phi.dot(psi)).norm();
  return std::min({r1, r2, 1.0});
}

double proj_distance(const ProjectionHandle& p, const ProjectionHandle& q) {
  if (p.space_tag != q.space_tag)
    throw DimensionError("proj_distance: projections live on " + p.space_tag +
                         " vs " + q.space_tag);
  return proj_distance(p.phi, q.phi);
}

Eigen::VectorXcd embed_vacuum(const Eigen::VectorXcd& phi,
                              const FockBasis& basis_small,
                              const FockBasis& basis_large) {
  if (basis_large.modes() < basis_small.modes() ||
      basis_large.nmax() < basis_small.nmax())
    throw DimensionError("embed_vacuum: large basis does not extend small");
  if (basis_small.size() == 0 ||
      phi.size() % Eigen::Index(basis_small.size()) != 0)
    throw DimensionError("embed_vacuum: vector does not factor over basis");
  const std::size_t blocks = std::size_t(phi.size()) / basis_small.size();

  Eigen::VectorXcd out =
      Eigen::VectorXcd::Zero(Eigen::Index(blocks * basis_large.size()));
  std::vector<int> occ(std::size_t(basis_large.modes()), 0);
  for (std::size_t i = 0; i < basis_small.size(); ++i) {
    std::fill(occ.begin(), occ.end(), 0);
    const auto& small_occ = basis_small.state(i).occ;
    std::copy(small_occ.begin(), small_occ.end(), occ.begin());
    const auto j = basis_large.index_of(occ);
    if (!j)
      throw DimensionError("embed_vacuum: embedded state missing from basis");
    for (std::size_t s = 0; s < blocks; ++s)
      out[Eigen::Index(s * basis_large.size() + *j)] =
          phi[Eigen::Index(s * basis_small.size() + i)];
  }
  return out;
}

Eigen::MatrixXcd riesz_projection(const SparseOperator& h, double center,
                                  double radius, int K,
                                  const RieszOptions& opts) {
  if (K < 4) throw ConfigError("riesz_projection: need at least 4 nodes");
  if (!(radius > 0.0)) throw ConfigError("riesz_projection: radius must be > 0");

  const Eigen::MatrixXcd hd = h.dense();
  if (h.dim() <= opts.guard_dense_cap) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
        hd, Eigen::EigenvaluesOnly);
    const double guard = opts.guard_factor * radius;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
      const double dist =
          std::abs(std::abs(solver.eigenvalues()[i] - center) - radius);
      if (dist < guard)
        throw SolverError(
            "riesz_projection: eigenvalue " +
            std::to_string(solver.eigenvalues()[i]) +
            " lies within the guard band of the contour");
    }
  }

  const Eigen::Index n = hd.rows();
  Eigen::MatrixXcd proj = Eigen::MatrixXcd::Zero(n, n);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  for (int k = 0; k < K; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / K;
    const cxd phase = std::polar(1.0, theta);
    const cxd z = cxd(center, 0.0) + radius * phase;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(hd - z * id);
    const Eigen::MatrixXcd resolvent = lu.solve(id);
    // A nearly singular shift shows up as a bad residual on a probe.
    const double probe =
        ((hd - z * id) * resolvent.col(0) - id.col(0)).norm();
    if (!(probe < 1e-6))
      throw SolverError("riesz_projection: near-singular solve at z = (" +
                        std::to_string(z.real()) + ", " +
                        std::to_string(z.imag()) + ")");
    proj -= (radius / double(K)) * phase * resolvent;
  }
  return proj;
}

double field_bound_lhs(const ShellModes& shell, double rho_val,
                       const FockBasis& basis) {
  if (!(rho_val > 0.0))
    throw ConfigError("field_bound_lhs: rho must be > 0");
  if (basis.modes() != int(shell.nodes.size()))
    throw DimensionError(
        "field_bound_lhs: basis mode count must match the shell");

  std::vector<cxd> coeffs;
  std::vector<double> freqs;
  for (const auto& node : shell.nodes) {
    coeffs.emplace_back(node.lambda, 0.0);
    freqs.push_back(node.omega);
  }
  const SparseOperator phi = field_matrix(basis, coeffs);

  // Diagonal (H_ph + rho)^(-1/2).
  Eigen::VectorXd dinv(Eigen::Index(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    double e = rho_val;
    const auto& occ = basis.state(i).occ;
    for (std::size_t m = 0; m < occ.size(); ++m) e += occ[m] * freqs[m];
    dinv[Eigen::Index(i)] = 1.0 / std::sqrt(e);
  }

  if (basis.size() <= 2000) {
    Eigen::MatrixXcd a = phi.dense() * dinv.asDiagonal();
    return detail::sigma_max_dense(a);
  }
  const auto apply = [&](const Eigen::VectorXcd& x) {
    return phi.apply((dinv.array() * x.array()).matrix());
  };
  const auto apply_adj = [&](const Eigen::VectorXcd& y) {
    Eigen::VectorXcd w = phi.apply(y);
    return Eigen::VectorXcd((dinv.array() * w.array()).matrix());
  };
  return detail::sigma_max_power(apply, apply_adj, basis.size());
}

ResolventNorms resolvent_coupling_norm(const ModelParams& params, int n,
                                       cxd z, const ResolventOptions& opts) {
  const SparseOperator htilde = assemble_Htilde(params, n);
  const SparseOperator hnext = assemble_Hn(params, n + 1);
  const SparseOperator phi = coupling_step(params, n);
  if (htilde.dim() > opts.dense_cap)
    throw SizeError("resolvent_coupling_norm: dimension " +
                        std::to_string(htilde.dim()) +
                        " exceeds the dense probe cap",
                    double(htilde.dim()));

  const double guard =
      opts.guard >= 0.0 ? opts.guard : rho(params, n + 1) / 16.0;
  const Eigen::MatrixXcd phid = phi.dense();
  const Eigen::Index dim = phid.rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);

  ResolventNorms out;
  const auto probe = [&](const SparseOperator& h) {
    Eigen::MatrixXcd hd = h.dense();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
        hd, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
      if (std::abs(cxd(solver.eigenvalues()[i], 0.0) - z) < guard)
        throw SolverError(
            "resolvent_coupling_norm: z lies within the spectrum guard");
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(hd - z * id);
    return detail::sigma_max_dense(phid * lu.solve(id));
  };
  out.tilde = probe(htilde);
  out.next = probe(hnext);
  return out;
}

double quadratic_form_floor(const ModelParams& params, int n) {
  return quadratic_form_floor_deep(params, n, n + 1);
}

double quadratic_form_floor_deep(const ModelParams& params, int n,
                                 int deep_level) {
  if (deep_level < n + 1)
    throw DimensionError("quadratic_form_floor: deep level must exceed n");
  const double rho_n = rho(params, n);
  const SparseOperator hdeep = assemble_Hn(params, deep_level);
  const SparseOperator hn_embedded =
      assemble_embedded_Hn(params, n, deep_level);
  const SparseOperator shell_free = shell_free_field(params, n, deep_level);

  const SparseOperator diff =
      shifted(hdeep, cxd(rho_n, 0.0)) -
      (hn_embedded +
       cxd(1.0 - params.g, 0.0) * shifted(shell_free, cxd(rho_n, 0.0)));
  const SparseOperator d(diff.dim(), diff.entries(), true);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      d.dense(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()[0];
}

Eigen::VectorXcd deflated_solve(const SparseOperator& h, double e,
                                const Eigen::VectorXcd& phi,
                                const Eigen::VectorXcd& b) {
  if (std::size_t(phi.size()) != h.dim() || std::size_t(b.size()) != h.dim())
    throw DimensionError("deflated_solve: dimension mismatch");
  Eigen::MatrixXcd a = h.dense();
  a.diagonal().array() -= e;
  a += phi * phi.adjoint();  // nonsingular on the deflated problem
  Eigen::VectorXcd rhs = b - phi * phi.dot(b);
  Eigen::VectorXcd x = a.ldlt().solve(rhs);
  x -= phi * phi.dot(x);
  return x;
}

}  // namespace irflow
