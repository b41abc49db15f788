#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "irflow/fock.hpp"
#include "irflow/spectral.hpp"

namespace irflow {

/// One +-1 label per (spin (x) Fock) basis state:
/// (sigma3 eigenvalue) * (-1)^(total photon number).
struct SectorLabels {
  std::vector<std::int8_t> labels;

  std::size_t dim() const { return labels.size(); }
};

/// Labels of the conserved parity on C^2 (x) basis (spin-major index).
SectorLabels parity_labels(const FockBasis& basis);

/// The parity operator S = sigma3 (-1)^N as a diagonal +-1 matrix;
/// S^2 = 1 exactly.
SparseOperator parity_matrix(const FockBasis& basis);

/// Max-row-sum norm of AB - BA. Diagonal operands use an exact
/// entrywise path; the general case multiplies sparsely.
double commutator_norm(const SparseOperator& a, const SparseOperator& b);

/// True when every stored entry of h connects equal-label states, i.e.
/// [S, h] = 0 exactly.
bool preserves_sectors(const SparseOperator& h, const SectorLabels& labels);

/// Lowest eigenpair within each parity sector (plus first, minus second).
/// Refuses operators that do not commute with S. Each returned phi0 is a
/// full-space vector supported on its sector alone; a one-dimensional
/// sector reports E1 = +infinity.
std::pair<EigenResult, EigenResult> sector_solve(const SparseOperator& h,
                                                 const SectorLabels& labels,
                                                 double tol,
                                                 const LowestTwoOptions& opts = {});

/// <phi, (sigma1 (x) 1) phi>; exactly zero for vectors supported in a
/// single parity sector.
cxd sigma1_expectation(const Eigen::VectorXcd& phi);

/// <phi, (sigma3 (x) 1) phi> (diagonal-coupling contrast probe).
cxd sigma3_expectation(const Eigen::VectorXcd& phi);

}  // namespace irflow
