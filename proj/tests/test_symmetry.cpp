#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "irflow/model.hpp"
#include "irflow/oracle.hpp"
#include "irflow/symmetry.hpp"

using namespace irflow;

TEST_CASE("parity labels combine spin sign and photon parity") {
  const FockBasis basis = enumerate_basis(2, 2);
  const SectorLabels labels = parity_labels(basis);
  REQUIRE(labels.dim() == 2 * basis.size());

  // spin-up (x) vacuum -> +1
  CHECK(labels.labels[0] == 1);
  // spin-down (x) vacuum -> -1
  CHECK(labels.labels[basis.size()] == -1);
  const auto one_photon = basis.index_of({1, 0});
  REQUIRE(one_photon.has_value());
  // spin-up (x) one photon -> -1, spin-down (x) one photon -> +1
  CHECK(labels.labels[*one_photon] == -1);
  CHECK(labels.labels[basis.size() + *one_photon] == 1);

  int plus = 0, minus = 0;
  for (auto l : labels.labels) (l > 0 ? plus : minus)++;
  CHECK(plus > 0);
  CHECK(minus > 0);
}

TEST_CASE("parity operator squares to the identity exactly") {
  const FockBasis basis = enumerate_basis(2, 3);
  const SparseOperator s = parity_matrix(basis);
  const SparseOperator s2 = matmul(s, s);
  const Eigen::MatrixXcd m = s2.dense();
  CHECK((m - Eigen::MatrixXcd::Identity(m.rows(), m.cols()))
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("parity commutes exactly with every assembled level") {
  ModelParams p = ModelParams::baseline();
  for (int n : {0, 1, 2, 3}) {
    const FockBasis basis = level_basis(p, n);
    const SparseOperator s = parity_matrix(basis);
    const SparseOperator h = assemble_Hn(p, n);
    CHECK(commutator_norm(s, h) == 0.0);
    CHECK(commutator_norm(s, h) <= 1e-15 * h.norm_one());
    CHECK(preserves_sectors(h, parity_labels(basis)));
  }
}

TEST_CASE("parity anti-commutes with the off-diagonal coupling") {
  const FockBasis basis = enumerate_basis(0, 0);  // spin only
  const SparseOperator s = parity_matrix(basis);
  SparseBuilder b(2);
  b.add(0, 1, cxd(1.0, 0.0));
  b.add(1, 0, cxd(1.0, 0.0));
  const SparseOperator sigma1 = b.build(true);
  CHECK(commutator_norm(s, sigma1) == 2.0);
}

TEST_CASE("ladder pull-through as a commutator") {
  const FockBasis basis = enumerate_basis(2, 3);
  const SparseOperator n_op = number_matrix(basis);
  for (int j = 0; j < 2; ++j) {
    const SparseOperator a = annihilation_matrix(basis, j);
    // [N, a_j] = -a_j entrywise
    const SparseOperator comm =
        matmul(n_op, a) - matmul(a, n_op);
    CHECK((comm - (cxd(-1.0, 0.0) * a)).norm_inf() == 0.0);
  }
}

TEST_CASE("sector solve splits the bare atom") {
  const ModelParams p = ModelParams::baseline();
  const FockBasis basis = level_basis(p, 0);
  const SparseOperator h = assemble_Hn(p, 0);
  const auto [plus, minus] = sector_solve(h, parity_labels(basis), 1e-12);
  CHECK(plus.E0 == 2.0);   // spin-up (x) vacuum
  CHECK(minus.E0 == 0.0);  // spin-down (x) vacuum: the global ground state
  CHECK(minus.phi0[1] == cxd(1.0, 0.0));
}

TEST_CASE("sector solve refuses operators that break the symmetry") {
  const ModelParams p = ModelParams::baseline();
  const FockBasis basis = level_basis(p, 1);
  const SparseOperator h_diag =
      assemble_Hn_with_coupling(p, 1, kSigma3);
  CHECK_THROWS_AS(sector_solve(h_diag, parity_labels(basis), 1e-11),
                  SolverError);
}

TEST_CASE("sector grounds match the dense oracle per sector") {
  ModelParams p = ModelParams::baseline();
  p.g = 0.0;
  const FockBasis basis = level_basis(p, 2);
  const SparseOperator h = assemble_Hn(p, 2);
  const SectorLabels labels = parity_labels(basis);
  const auto [plus, minus] = sector_solve(h, labels, 1e-12);

  // oracle: full spectrum, then the lowest value per sector from the
  // diagonal structure at g = 0
  const ModeSet set = build_mode_set(p, 2);
  double best_plus = 1e300, best_minus = 1e300;
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t i = 0; i < basis.size(); ++i) {
      double e = s == 0 ? 2.0 : 0.0;
      for (std::size_t m = 0; m < set.mode_count(); ++m)
        e += basis.state(i).occ[m] * set.frequencies()[m];
      const int label = (s == 0 ? 1 : -1) *
                        (basis.state(i).total() % 2 == 0 ? 1 : -1);
      (label > 0 ? best_plus : best_minus) =
          std::min(label > 0 ? best_plus : best_minus, e);
    }
  CHECK(plus.E0 == doctest::Approx(best_plus).epsilon(1e-12));
  CHECK(minus.E0 == doctest::Approx(best_minus).epsilon(1e-12));
}

TEST_CASE("sector ground vectors have no amplitude on the other sector") {
  const ModelParams p = ModelParams::baseline();
  const FockBasis basis = level_basis(p, 3);
  const SparseOperator h = assemble_Hn(p, 3);
  const SectorLabels labels = parity_labels(basis);
  const auto [plus, minus] = sector_solve(h, labels, p.tol_eig);

  for (std::size_t i = 0; i < labels.dim(); ++i) {
    if (labels.labels[i] < 0)
      CHECK(std::abs(plus.phi0[Eigen::Index(i)]) == 0.0);
    else
      CHECK(std::abs(minus.phi0[Eigen::Index(i)]) == 0.0);
  }
  // sector ground energies separated by at least the gap bound
  CHECK(plus.E0 - minus.E0 >= 0.5 * rho(p, 3) - 1e-11);
}

TEST_CASE("sigma1 element vanishes on single-sector vectors") {
  const ModelParams p = ModelParams::baseline();
  const FockBasis basis = level_basis(p, 2);
  const SparseOperator h = assemble_Hn(p, 2);
  const auto [plus, minus] = sector_solve(h, parity_labels(basis), p.tol_eig);
  CHECK(std::abs(sigma1_expectation(minus.phi0)) == 0.0);
  CHECK(std::abs(sigma1_expectation(plus.phi0)) == 0.0);

  // spin-down (x) vacuum: sigma1 flips the spin
  Eigen::VectorXcd down = Eigen::VectorXcd::Zero(Eigen::Index(2 * basis.size()));
  down[Eigen::Index(basis.size())] = cxd(1.0, 0.0);
  CHECK(sigma1_expectation(down) == cxd(0.0, 0.0));
}

TEST_CASE("unrestricted ground state also kills the sigma1 element") {
  const ModelParams p = ModelParams::baseline();
  for (int n : {1, 2, 3}) {
    const SparseOperator h = assemble_Hn(p, n);
    const EigenResult r = lowest_two(h, p.tol_eig);
    CHECK(std::abs(sigma1_expectation(r.phi0)) <= 1e-12);
  }
}

TEST_CASE("diagonal coupling leaves a spin-polarized ground state") {
  // single mode, moderate shift: exact coherent ground state on the lower
  // branch, <sigma3> = -1
  ModelParams p = ModelParams::baseline();
  p.N_max = 6;
  const SparseOperator h = assemble_Hn_with_coupling(p, 1, kSigma3);
  const EigenResult r = lowest_two(h, 1e-11);
  CHECK(std::abs(sigma3_expectation(r.phi0) - cxd(-1.0, 0.0)) <= 1e-12);
  CHECK(std::abs(sigma1_expectation(r.phi0)) <= 1e-12);
}

TEST_CASE("commutator norm validates dimensions") {
  const FockBasis small = enumerate_basis(1, 1);
  const FockBasis big = enumerate_basis(2, 1);
  CHECK_THROWS_AS(
      commutator_norm(parity_matrix(small), parity_matrix(big)),
      DimensionError);
}
