#include "irflow/symmetry.hpp"

#include <cmath>
#include <limits>

namespace irflow {

SectorLabels parity_labels(const FockBasis& basis) {
  SectorLabels out;
  out.labels.resize(2 * basis.size());
  for (std::size_t s = 0; s < 2; ++s) {
    const int spin_sign = s == 0 ? 1 : -1;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const int photon_sign = basis.state(i).total() % 2 == 0 ? 1 : -1;
      out.labels[s * basis.size() + i] = std::int8_t(spin_sign * photon_sign);
    }
  }
  return out;
}

SparseOperator parity_matrix(const FockBasis& basis) {
  const SectorLabels labels = parity_labels(basis);
  SparseBuilder builder(labels.dim());
  for (std::size_t i = 0; i < labels.dim(); ++i)
    builder.add(i, i, cxd(double(labels.labels[i]), 0.0));
  return builder.build(true);
}

double commutator_norm(const SparseOperator& a, const SparseOperator& b) {
  if (a.dim() != b.dim())
    throw DimensionError("commutator_norm: dimension mismatch");
  if (a.is_diagonal() || b.is_diagonal()) {
    // With one diagonal factor d the commutator is (d_r - d_c) m_rc
    // entrywise, exactly.
    const SparseOperator& diag = a.is_diagonal() ? a : b;
    const SparseOperator& other = a.is_diagonal() ? b : a;
    std::vector<cxd> d(diag.dim(), cxd(0.0, 0.0));
    for (const auto& e : diag.entries()) d[e.row] = e.value;
    std::vector<double> row_sums(a.dim(), 0.0);
    for (const auto& e : other.entries())
      row_sums[e.row] += std::abs((d[e.row] - d[e.col]) * e.value);
    double best = 0.0;
    for (double s : row_sums) best = std::max(best, s);
    return best;
  }
  return (matmul(a, b) - matmul(b, a)).norm_inf();
}

bool preserves_sectors(const SparseOperator& h, const SectorLabels& labels) {
  if (h.dim() != labels.dim())
    throw DimensionError("preserves_sectors: dimension mismatch");
  for (const auto& e : h.entries())
    if (labels.labels[e.row] != labels.labels[e.col]) return false;
  return true;
}

namespace {

// Compress h to the given sector; the index map sends sector positions to
// full-space positions.
SparseOperator restrict_to(const SparseOperator& h,
                           const std::vector<std::size_t>& sector,
                           const std::vector<std::ptrdiff_t>& position) {
  SparseBuilder builder(sector.size());
  for (const auto& e : h.entries()) {
    const std::ptrdiff_t r = position[e.row];
    const std::ptrdiff_t c = position[e.col];
    if (r >= 0 && c >= 0) builder.add(std::size_t(r), std::size_t(c), e.value);
  }
  return builder.build(h.hermitian());
}

EigenResult solve_sector(const SparseOperator& h,
                         const std::vector<std::size_t>& sector,
                         const std::vector<std::ptrdiff_t>& position,
                         double tol, const LowestTwoOptions& opts) {
  EigenResult out;
  if (sector.empty()) {
    out.E0 = std::numeric_limits<double>::infinity();
    out.E1 = std::numeric_limits<double>::infinity();
    out.gap = 0.0;
    return out;
  }
  if (sector.size() == 1) {
    cxd diag(0.0, 0.0);
    for (const auto& e : h.entries())
      if (e.row == sector[0] && e.col == sector[0]) diag = e.value;
    out.E0 = diag.real();
    out.E1 = std::numeric_limits<double>::infinity();
    out.gap = std::numeric_limits<double>::infinity();
    out.phi0 = Eigen::VectorXcd::Zero(Eigen::Index(h.dim()));
    out.phi0[Eigen::Index(sector[0])] = cxd(1.0, 0.0);
    out.residual = 0.0;
    out.method = "dense";
    return out;
  }

  LowestTwoOptions sector_opts = opts;
  if (opts.start && opts.start->size() == Eigen::Index(h.dim())) {
    Eigen::VectorXcd start(Eigen::Index(sector.size()));
    for (std::size_t i = 0; i < sector.size(); ++i)
      start[Eigen::Index(i)] = (*opts.start)[Eigen::Index(sector[i])];
    if (start.norm() > 1e-12) {
      start.normalize();
      sector_opts.start = start;
    } else {
      sector_opts.start.reset();
    }
  }

  const SparseOperator hs = restrict_to(h, sector, position);
  EigenResult r = lowest_two(hs, tol, sector_opts);
  out = r;
  out.phi0 = Eigen::VectorXcd::Zero(Eigen::Index(h.dim()));
  for (std::size_t i = 0; i < sector.size(); ++i)
    out.phi0[Eigen::Index(sector[i])] = r.phi0[Eigen::Index(i)];
  return out;
}

}  // namespace

std::pair<EigenResult, EigenResult> sector_solve(const SparseOperator& h,
                                                 const SectorLabels& labels,
                                                 double tol,
                                                 const LowestTwoOptions& opts) {
  if (!preserves_sectors(h, labels))
    throw SolverError(
        "sector_solve: operator does not commute with the parity labels; "
        "refusing to split");
  std::vector<std::size_t> plus, minus;
  std::vector<std::ptrdiff_t> pos_plus(h.dim(), -1), pos_minus(h.dim(), -1);
  for (std::size_t i = 0; i < labels.dim(); ++i) {
    if (labels.labels[i] > 0) {
      pos_plus[i] = std::ptrdiff_t(plus.size());
      plus.push_back(i);
    } else {
      pos_minus[i] = std::ptrdiff_t(minus.size());
      minus.push_back(i);
    }
  }
  return {solve_sector(h, plus, pos_plus, tol, opts),
          solve_sector(h, minus, pos_minus, tol, opts)};
}

cxd sigma1_expectation(const Eigen::VectorXcd& phi) {
  if (phi.size() % 2 != 0)
    throw DimensionError("sigma1_expectation: odd dimension");
  const Eigen::Index f = phi.size() / 2;
  cxd v(0.0, 0.0);
  for (Eigen::Index i = 0; i < f; ++i)
    v += std::conj(phi[i]) * phi[f + i] + std::conj(phi[f + i]) * phi[i];
  return v;
}

cxd sigma3_expectation(const Eigen::VectorXcd& phi) {
  if (phi.size() % 2 != 0)
    throw DimensionError("sigma3_expectation: odd dimension");
  const Eigen::Index f = phi.size() / 2;
  cxd v(0.0, 0.0);
  for (Eigen::Index i = 0; i < f; ++i)
    v += std::conj(phi[i]) * phi[i] - std::conj(phi[f + i]) * phi[f + i];
  return v;
}

}  // namespace irflow
