#include "irflow/fock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace irflow {

namespace {

// binomial(M + N, N) with overflow saturation to +inf.
double truncated_dim(int M, int N) {
  double dim = 1.0;
  for (int i = 1; i <= N; ++i) dim *= double(M + i) / double(i);
  return std::round(dim);
}

}  // namespace

std::optional<std::size_t> FockBasis::index_of(
    const std::vector<int>& occ) const {
  auto it = index_.find(occ);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

FockBasis enumerate_basis(int M, int N_max, std::size_t budget) {
  if (M < 0) throw DimensionError("enumerate_basis: mode count must be >= 0");
  if (N_max < 0) throw DimensionError("enumerate_basis: N_max must be >= 0");

  const double dim = truncated_dim(M, N_max);
  if (dim > double(budget)) {
    throw SizeError("enumerate_basis: truncated basis would hold " +
                        std::to_string(std::uint64_t(std::min(
                            dim, 1.8e19))) +
                        " states, above the budget of " +
                        std::to_string(budget),
                    dim);
  }

  FockBasis basis;
  basis.modes_ = M;
  basis.nmax_ = N_max;
  basis.states_.reserve(std::size_t(dim));

  // Graded order: total photon number ascending, lexicographic within a
  // grade. M = 0 holds the single empty state (bare vacuum).
  std::vector<int> occ(std::size_t(M), 0);
  for (int total = 0; total <= N_max; ++total) {
    if (M == 0) {
      if (total == 0) basis.states_.push_back(OccupationState{occ});
      continue;
    }
    // First tuple of the grade in lexicographic order: (0,...,0,total).
    std::fill(occ.begin(), occ.end(), 0);
    occ.back() = total;
    while (true) {
      basis.states_.push_back(OccupationState{occ});
      // Next tuple with the same sum: find the rightmost position that can
      // donate to a position on its left.
      int j = M - 1;
      while (j > 0 && occ[std::size_t(j)] == 0) --j;
      if (j == 0) break;
      int tail = occ[std::size_t(j)];
      occ[std::size_t(j)] = 0;
      occ[std::size_t(j - 1)] += 1;
      occ.back() = tail - 1;
    }
  }

  for (std::size_t i = 0; i < basis.states_.size(); ++i)
    basis.index_[basis.states_[i].occ] = i;
  return basis;
}

SparseOperator::SparseOperator(std::size_t dim, std::vector<Entry> entries,
                               bool hermitian)
    : dim_(dim), entries_(std::move(entries)), hermitian_(hermitian) {}

bool SparseOperator::is_diagonal() const {
  for (const auto& e : entries_)
    if (e.row != e.col) return false;
  return true;
}

Eigen::VectorXcd SparseOperator::apply(const Eigen::VectorXcd& x) const {
  if (std::size_t(x.size()) != dim_)
    throw DimensionError("SparseOperator::apply: vector length mismatch");
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(Eigen::Index(dim_));
  for (const auto& e : entries_)
    y[Eigen::Index(e.row)] += e.value * x[Eigen::Index(e.col)];
  return y;
}

Eigen::MatrixXcd SparseOperator::dense() const {
  Eigen::MatrixXcd m =
      Eigen::MatrixXcd::Zero(Eigen::Index(dim_), Eigen::Index(dim_));
  for (const auto& e : entries_)
    m(Eigen::Index(e.row), Eigen::Index(e.col)) = e.value;
  return m;
}

double SparseOperator::norm_one() const {
  std::vector<double> col_sums(dim_, 0.0);
  for (const auto& e : entries_) col_sums[e.col] += std::abs(e.value);
  double best = 0.0;
  for (double s : col_sums) best = std::max(best, s);
  return best;
}

double SparseOperator::norm_inf() const {
  std::vector<double> row_sums(dim_, 0.0);
  for (const auto& e : entries_) row_sums[e.row] += std::abs(e.value);
  double best = 0.0;
  for (double s : row_sums) best = std::max(best, s);
  return best;
}

void SparseBuilder::add(std::size_t row, std::size_t col, cxd value) {
  if (row >= dim_ || col >= dim_)
    throw DimensionError("SparseBuilder::add: index out of range");
  coeffs_[{row, col}] += value;
}

void SparseBuilder::add_sym(std::size_t row, std::size_t col, cxd value) {
  add(row, col, value);
  add(col, row, std::conj(value));
}

SparseOperator SparseBuilder::build(bool hermitian) const {
  std::vector<SparseOperator::Entry> entries;
  entries.reserve(coeffs_.size());
  for (const auto& [rc, v] : coeffs_) {
    if (v == cxd(0.0, 0.0)) continue;
    entries.push_back({rc.first, rc.second, v});
  }
  return SparseOperator(dim_, std::move(entries), hermitian);
}

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) {
  if (a.dim() != b.dim())
    throw DimensionError("SparseOperator +: dimension mismatch");
  SparseBuilder builder(a.dim());
  for (const auto& e : a.entries()) builder.add(e.row, e.col, e.value);
  for (const auto& e : b.entries()) builder.add(e.row, e.col, e.value);
  return builder.build(a.hermitian() && b.hermitian());
}

SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) {
  return a + (cxd(-1.0, 0.0) * b);
}

SparseOperator operator*(cxd scale, const SparseOperator& a) {
  std::vector<SparseOperator::Entry> entries;
  entries.reserve(a.entries().size());
  for (const auto& e : a.entries()) {
    cxd v = scale * e.value;
    if (v != cxd(0.0, 0.0)) entries.push_back({e.row, e.col, v});
  }
  const bool herm = a.hermitian() && scale.imag() == 0.0;
  return SparseOperator(a.dim(), std::move(entries), herm);
}

SparseOperator shifted(const SparseOperator& a, cxd shift) {
  SparseBuilder builder(a.dim());
  for (const auto& e : a.entries()) builder.add(e.row, e.col, e.value);
  for (std::size_t i = 0; i < a.dim(); ++i) builder.add(i, i, shift);
  return builder.build(a.hermitian() && shift.imag() == 0.0);
}

SparseOperator matmul(const SparseOperator& a, const SparseOperator& b) {
  if (a.dim() != b.dim())
    throw DimensionError("matmul: dimension mismatch");
  // Column-indexed view of b for the row-major merge.
  std::vector<std::vector<SparseOperator::Entry>> b_rows(b.dim());
  for (const auto& e : b.entries()) b_rows[e.row].push_back(e);
  SparseBuilder builder(a.dim());
  for (const auto& ea : a.entries())
    for (const auto& eb : b_rows[ea.col])
      builder.add(ea.row, eb.col, ea.value * eb.value);
  return builder.build(false);
}

SparseOperator creation_matrix(const FockBasis& basis, int mode) {
  if (mode < 0 || mode >= basis.modes())
    throw DimensionError("creation_matrix: mode index out of range");
  SparseBuilder builder(basis.size());
  std::vector<int> target;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    target = basis.state(i).occ;
    target[std::size_t(mode)] += 1;
    if (auto j = basis.index_of(target)) {
      const double amp = std::sqrt(double(target[std::size_t(mode)]));
      builder.add(*j, i, cxd(amp, 0.0));
    }
  }
  return builder.build(false);
}

SparseOperator annihilation_matrix(const FockBasis& basis, int mode) {
  if (mode < 0 || mode >= basis.modes())
    throw DimensionError("annihilation_matrix: mode index out of range");
  SparseBuilder builder(basis.size());
  std::vector<int> target;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const int nj = basis.state(i).occ[std::size_t(mode)];
    if (nj == 0) continue;
    target = basis.state(i).occ;
    target[std::size_t(mode)] -= 1;
    const auto j = basis.index_of(target);
    // Lowering never leaves the truncated set.
    builder.add(*j, i, cxd(std::sqrt(double(nj)), 0.0));
  }
  return builder.build(false);
}

SparseOperator number_matrix(const FockBasis& basis) {
  SparseBuilder builder(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const int t = basis.state(i).total();
    if (t != 0) builder.add(i, i, cxd(double(t), 0.0));
  }
  return builder.build(true);
}

namespace detail {
SparseOperator weighted_number_diag(const FockBasis& basis,
                                    const std::vector<double>& weights) {
  if (int(weights.size()) != basis.modes())
    throw DimensionError("weighted_number_diag: weight count mismatch");
  SparseBuilder builder(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    double e = 0.0;
    const auto& occ = basis.state(i).occ;
    for (std::size_t m = 0; m < occ.size(); ++m) e += occ[m] * weights[m];
    if (e != 0.0) builder.add(i, i, cxd(e, 0.0));
  }
  return builder.build(true);
}
}  // namespace detail

SparseOperator hph_matrix(const FockBasis& basis,
                          const std::vector<double>& freqs) {
  if (int(freqs.size()) != basis.modes())
    throw DimensionError("hph_matrix: frequency count mismatch");
  for (double w : freqs)
    if (!(w > 0.0))
      throw DimensionError("hph_matrix: frequencies must be positive");
  return detail::weighted_number_diag(basis, freqs);
}

SparseOperator field_matrix(const FockBasis& basis,
                            const std::vector<cxd>& coeffs) {
  if (int(coeffs.size()) != basis.modes())
    throw DimensionError("field_matrix: coefficient count mismatch");
  SparseBuilder builder(basis.size());
  std::vector<int> target;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (int m = 0; m < basis.modes(); ++m) {
      if (coeffs[std::size_t(m)] == cxd(0.0, 0.0)) continue;
      target = basis.state(i).occ;
      target[std::size_t(m)] += 1;
      if (auto j = basis.index_of(target)) {
        const double amp = std::sqrt(double(target[std::size_t(m)]));
        builder.add_sym(*j, i, coeffs[std::size_t(m)] * amp);
      }
    }
  }
  return builder.build(true);
}

}  // namespace irflow
