#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "irflow/model.hpp"
#include "irflow/oracle.hpp"

using namespace irflow;

TEST_CASE("rho is the plain multiply chain kappa gamma^n") {
  const ModelParams p = ModelParams::baseline();
  CHECK(rho(p, 0) == 0.5);
  CHECK(rho(p, 2) == doctest::Approx(0.005).epsilon(1e-15));
  for (int n = 0; n < 12; ++n) CHECK(rho(p, n + 1) < rho(p, n));
  // bitwise deterministic
  CHECK(rho(p, 7) == rho(p, 7));
}

TEST_CASE("parameter validation enforces the smallness hypothesis") {
  ModelParams p = ModelParams::baseline();
  CHECK_NOTHROW(validate(p));

  p.g = p.gamma / 32.0;  // violates g < gamma/64
  CHECK_THROWS_AS(validate(p), ConfigError);
  try {
    validate(p);
  } catch (const ConfigError& err) {
    CHECK(std::string(err.what()).find("g < 1/64 gamma") !=
          std::string::npos);
  }
  p.allow_out_of_regime = true;
  CHECK_NOTHROW(validate(p));

  ModelParams q = ModelParams::baseline();
  q.kappa = 1.0;
  CHECK_THROWS_AS(validate(q), ConfigError);
}

TEST_CASE("baseline shell 0 discretizes to the frozen single node") {
  const ModelParams p = ModelParams::baseline();
  const ShellModes shell = discretize_shell(p, 0);
  REQUIRE(shell.nodes.size() == 1);
  CHECK(shell.nodes[0].omega == doctest::Approx(0.275).epsilon(1e-14));
  // lambda^2 = (g^2 / 4pi) * 0.45 * 0.275
  CHECK(shell.nodes[0].lambda ==
        doctest::Approx(9.9235639282523e-05).epsilon(1e-13));
}

TEST_CASE("zero profile kills every coupling weight") {
  ModelParams p = ModelParams::baseline();
  p.f = RadialProfile::zero();
  p.J = 3;
  for (int n = 0; n < 3; ++n)
    for (const auto& node : discretize_shell(p, n).nodes)
      CHECK(node.lambda == 0.0);
}

TEST_CASE("shell sums reproduce the closed-form radial integrals") {
  for (int J : {1, 2, 5}) {
    ModelParams p = ModelParams::baseline();
    p.J = J;
    for (int n = 0; n < 6; ++n) {
      const InteractionNorms norms = interaction_norms(discretize_shell(p, n));
      const double lo = rho(p, n + 1), hi = rho(p, n);
      const double closed =
          p.g * p.g * (hi * hi - lo * lo) / (8.0 * std::numbers::pi);
      CHECK(norms.l2 * norms.l2 == doctest::Approx(closed).epsilon(1e-14));
      const double closed_w =
          p.g * p.g * (hi - lo) / (4.0 * std::numbers::pi);
      CHECK(norms.weighted * norms.weighted ==
            doctest::Approx(closed_w).epsilon(1e-14));
    }
  }
}

TEST_CASE("shell sums agree with the independent quadrature oracle") {
  ModelParams p = ModelParams::baseline();
  p.J = 2;
  for (int n = 0; n < 4; ++n) {
    const InteractionNorms norms = interaction_norms(discretize_shell(p, n));
    CHECK(norms.l2 * norms.l2 ==
          doctest::Approx(oracle::shell_integral(p, n, 0)).epsilon(1e-13));
    CHECK(norms.weighted * norms.weighted ==
          doctest::Approx(oracle::shell_integral(p, n, -1)).epsilon(1e-13));
  }
}

TEST_CASE("interaction norms instantiate the field-bound right side") {
  const ModelParams p = ModelParams::baseline();
  const InteractionNorms n0 = interaction_norms(discretize_shell(p, 0));
  CHECK(n0.l2 == doctest::Approx(9.9235639282523e-05).epsilon(1e-12));
  CHECK(n0.weighted == doctest::Approx(1.89234939151512e-04).epsilon(1e-12));
  // 2(weighted + rho^-1/2 l2) <= g sqrt(rho) on every shell
  for (int n = 0; n < 8; ++n) {
    const InteractionNorms norms = interaction_norms(discretize_shell(p, n));
    const double rho_n = rho(p, n);
    CHECK(2.0 * (norms.weighted + norms.l2 / std::sqrt(rho_n)) <=
          p.g * std::sqrt(rho_n));
  }
}

TEST_CASE("mode sets concatenate shells with correct offsets") {
  ModelParams p = ModelParams::baseline();

  const ModeSet empty = build_mode_set(p, 0);
  CHECK(empty.mode_count() == 0);
  CHECK(empty.shells.empty());

  p.J = 2;
  const ModeSet set = build_mode_set(p, 3);
  CHECK(set.mode_count() == 6);
  REQUIRE(set.offsets.size() == 3);
  CHECK(set.offsets[0] == 0);
  CHECK(set.offsets[1] == 2);
  CHECK(set.offsets[2] == 4);
  for (double w : set.frequencies()) CHECK(w >= rho(p, 3));
}

TEST_CASE("level 0 Hamiltonian is the bare two-level atom") {
  const ModelParams p = ModelParams::baseline();
  const SparseOperator h = assemble_Hn(p, 0);
  REQUIRE(h.dim() == 2);
  const Eigen::MatrixXcd m = h.dense();
  CHECK(m(0, 0) == cxd(2.0, 0.0));
  CHECK(m(1, 1) == cxd(0.0, 0.0));
  CHECK(m(0, 1) == cxd(0.0, 0.0));
  CHECK(m(1, 0) == cxd(0.0, 0.0));
}

TEST_CASE("decoupled model has ground energy zero on spin-down vacuum") {
  ModelParams p = ModelParams::baseline();
  p.g = 0.0;
  const SparseOperator h = assemble_Hn(p, 2);
  const auto spectrum = oracle::dense_spectrum(h);
  CHECK(std::abs(spectrum.front()) <= 1e-14);
  // ground vector: spin-down tensor vacuum is an exact eigenvector
  const FockBasis basis = level_basis(p, 2);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Eigen::Index(2 * basis.size()));
  v[Eigen::Index(basis.size())] = cxd(1.0, 0.0);
  CHECK(h.apply(v).norm() == 0.0);
}

TEST_CASE("baseline level 1 energy matches second-order perturbation") {
  const ModelParams p = ModelParams::baseline();
  const auto spectrum = oracle::dense_spectrum(assemble_Hn(p, 1));
  const double e_pt = oracle::perturbative_E(p, 1);
  CHECK(e_pt == doctest::Approx(-4.328664661015835e-09).epsilon(1e-12));
  CHECK(std::abs(spectrum.front() - e_pt) <= 1e-11);  // 10 g^4 scale
}

TEST_CASE("assembled Hamiltonians are exactly Hermitian with real diagonal") {
  ModelParams p = ModelParams::baseline();
  p.J = 2;
  for (int n : {1, 2, 3}) {
    const SparseOperator h = assemble_Hn(p, n);
    CHECK(h.hermitian());
    const Eigen::MatrixXcd m = h.dense();
    CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      CHECK(m(i, i).imag() == 0.0);
  }
}

TEST_CASE("interpolant differs from the next level by the shell coupling") {
  const ModelParams p = ModelParams::baseline();
  for (int n : {0, 1, 2}) {
    const SparseOperator diff =
        assemble_Hn(p, n + 1) - assemble_Htilde(p, n);
    const SparseOperator step = coupling_step(p, n);
    CHECK((diff - step).norm_inf() == 0.0);
  }
}

TEST_CASE("interpolant ground energy equals the level energy") {
  const ModelParams p = ModelParams::baseline();
  for (int n : {0, 1, 2}) {
    const auto a = oracle::dense_spectrum(assemble_Hn(p, n));
    const auto b = oracle::dense_spectrum(assemble_Htilde(p, n));
    CHECK(std::abs(a.front() - b.front()) <= 1e-12);
  }
}

TEST_CASE("compressing the next level onto the shell vacuum recovers H_n") {
  ModelParams p = ModelParams::baseline();
  p.J = 2;
  const int n = 2;
  const FockBasis small = level_basis(p, n);
  const FockBasis big = level_basis(p, n + 1);
  const Eigen::MatrixXcd hn = assemble_Hn(p, n).dense();
  const Eigen::MatrixXcd hbig = assemble_Hn(p, n + 1).dense();

  std::vector<Eigen::Index> map(small.size());
  for (std::size_t i = 0; i < small.size(); ++i) {
    std::vector<int> occ = small.state(i).occ;
    occ.resize(std::size_t(big.modes()), 0);
    const auto j = big.index_of(occ);
    REQUIRE(j.has_value());
    map[i] = Eigen::Index(*j);
  }
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t t = 0; t < 2; ++t)
      for (std::size_t i = 0; i < small.size(); ++i)
        for (std::size_t j = 0; j < small.size(); ++j) {
          const cxd lhs = hbig(Eigen::Index(s * big.size()) + map[i],
                               Eigen::Index(t * big.size()) + map[j]);
          const cxd rhs = hn(Eigen::Index(s * small.size() + i),
                             Eigen::Index(t * small.size() + j));
          CHECK(lhs == rhs);
        }
}

TEST_CASE("coupling entries flip both spin and photon parity") {
  const ModelParams p = ModelParams::baseline();
  const SparseOperator step = coupling_step(p, 1);
  const FockBasis big = level_basis(p, 2);
  REQUIRE_FALSE(step.entries().empty());
  for (const auto& e : step.entries()) {
    const std::size_t spin_r = e.row / big.size();
    const std::size_t spin_c = e.col / big.size();
    CHECK(spin_r != spin_c);
    const int par_r = big.state(e.row % big.size()).total() % 2;
    const int par_c = big.state(e.col % big.size()).total() % 2;
    CHECK(par_r != par_c);
  }
}

TEST_CASE("embedded level operator treats removed shells as spectators") {
  const ModelParams p = ModelParams::baseline();
  const SparseOperator embedded = assemble_embedded_Hn(p, 1, 3);
  const FockBasis big = level_basis(p, 3);

  // spin-down with photons only in the removed shells: the removed modes
  // carry no frequency, so the action reduces to H_1 on spin-down vacuum,
  // i.e. one shell-0 coupling entry.
  const auto idx = big.index_of({0, 1, 1});
  REQUIRE(idx.has_value());
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Eigen::Index(2 * big.size()));
  v[Eigen::Index(big.size() + *idx)] = cxd(1.0, 0.0);
  const Eigen::VectorXcd w = embedded.apply(v);

  const double lambda0 = discretize_shell(p, 0).nodes[0].lambda;
  CHECK(w.norm() == doctest::Approx(lambda0).epsilon(1e-14));
  const auto flipped = big.index_of({1, 1, 1});
  REQUIRE(flipped.has_value());
  CHECK(w[Eigen::Index(*flipped)] == cxd(lambda0, 0.0));  // spin-up block
}

TEST_CASE("table profiles interpolate and stay inside the unit band") {
  ModelParams p = ModelParams::baseline();
  p.f = RadialProfile::table({{0.0, 1.0}, {0.5, 0.5}});
  CHECK(p.f(0.0) == 1.0);
  CHECK(p.f(0.25) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(p.f(0.9) == 0.5);
  CHECK_NOTHROW(validate(p));

  p.f = RadialProfile::table({{0.0, 2.0}, {0.5, 0.5}});
  CHECK_THROWS_AS(validate(p), ConfigError);
}

TEST_CASE("model and oracle quadrature rules agree node by node") {
  std::vector<double> xn, wn, xo, wo;
  detail::gauss_legendre(16, 0.2, 0.9, xn, wn);
  oracle::detail::gauss_legendre_newton(16, 0.2, 0.9, xo, wo);
  REQUIRE(xn.size() == xo.size());
  for (std::size_t i = 0; i < xn.size(); ++i) {
    CHECK(xn[i] == doctest::Approx(xo[i]).epsilon(1e-13));
    CHECK(wn[i] == doctest::Approx(wo[i]).epsilon(1e-12));
  }
}

TEST_CASE("ball norm matches the oracle ball integral") {
  const ModelParams p = ModelParams::baseline();
  for (int n : {0, 3, 8}) {
    const double primary = coupling_ball_norm(p, n);
    const double reference = std::sqrt(oracle::ball_integral(p, n));
    CHECK(primary == doctest::Approx(reference).epsilon(1e-13));
    const double closed =
        p.g * rho(p, n) / std::sqrt(8.0 * std::numbers::pi);
    CHECK(primary == doctest::Approx(closed).epsilon(1e-13));
  }
}
