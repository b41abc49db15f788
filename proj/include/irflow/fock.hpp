#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "irflow/errors.hpp"

namespace irflow {

using cxd = std::complex<double>;

/// One occupation-number state: a photon count per mode.
struct OccupationState {
  std::vector<int> occ;

  int total() const {
    int t = 0;
    for (int n : occ) t += n;
    return t;
  }
  bool operator==(const OccupationState& o) const { return occ == o.occ; }
};

/// All occupation states over M modes with total photon number <= N_max,
/// in graded-lexicographic order (by total, then lexicographic on the
/// occupation tuple). The ordering is deterministic across runs.
class FockBasis {
 public:
  static constexpr std::size_t kDefaultBudget = 4'000'000;

  int modes() const { return modes_; }
  int nmax() const { return nmax_; }
  std::size_t size() const { return states_.size(); }
  const OccupationState& state(std::size_t i) const { return states_[i]; }
  const std::vector<OccupationState>& states() const { return states_; }

  /// Exact position of an occupation vector, or nullopt if it is not in
  /// the basis (wrong length, negative entry, or total above the cap).
  std::optional<std::size_t> index_of(const std::vector<int>& occ) const;

  friend FockBasis enumerate_basis(int M, int N_max, std::size_t budget);

 private:
  int modes_ = 0;
  int nmax_ = 0;
  std::vector<OccupationState> states_;
  std::map<std::vector<int>, std::size_t> index_;
};

/// Enumerate the truncated basis {n in N0^M : sum n_i <= N_max}.
/// Throws SizeError when binomial(M+N_max, N_max) exceeds the budget.
FockBasis enumerate_basis(int M, int N_max,
                          std::size_t budget = FockBasis::kDefaultBudget);

/// Sparse Hermitian-aware matrix with deterministic (row-major) entry
/// ordering and no duplicate coordinates.
class SparseOperator {
 public:
  struct Entry {
    std::size_t row;
    std::size_t col;
    cxd value;
  };

  SparseOperator() = default;
  SparseOperator(std::size_t dim, std::vector<Entry> entries, bool hermitian);

  std::size_t dim() const { return dim_; }
  bool hermitian() const { return hermitian_; }
  const std::vector<Entry>& entries() const { return entries_; }
  bool is_diagonal() const;

  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
  Eigen::MatrixXcd dense() const;

  double norm_one() const;  // max absolute column sum
  double norm_inf() const;  // max absolute row sum

 private:
  std::size_t dim_ = 0;
  std::vector<Entry> entries_;
  bool hermitian_ = false;
};

/// Accumulates coefficients and merges duplicates; build() sorts entries
/// row-major and drops exact zeros.
class SparseBuilder {
 public:
  explicit SparseBuilder(std::size_t dim) : dim_(dim) {}
  void add(std::size_t row, std::size_t col, cxd value);
  /// Adds value at (row, col) and its conjugate at (col, row).
  void add_sym(std::size_t row, std::size_t col, cxd value);
  SparseOperator build(bool hermitian) const;

 private:
  std::size_t dim_;
  std::map<std::pair<std::size_t, std::size_t>, cxd> coeffs_;
};

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);
SparseOperator operator-(const SparseOperator& a, const SparseOperator& b);
SparseOperator operator*(cxd scale, const SparseOperator& a);
/// a + shift * identity
SparseOperator shifted(const SparseOperator& a, cxd shift);
/// Exact sparse product a * b.
SparseOperator matmul(const SparseOperator& a, const SparseOperator& b);

/// <n + e_j | a*_j | n> = sqrt(n_j + 1); states pushed past the total cap
/// are dropped (hard truncation).
SparseOperator creation_matrix(const FockBasis& basis, int mode);

/// Adjoint of creation_matrix; annihilates the vacuum column exactly.
SparseOperator annihilation_matrix(const FockBasis& basis, int mode);

/// Diagonal total photon number.
SparseOperator number_matrix(const FockBasis& basis);

/// Diagonal free-field energy sum_i n_i freq_i; frequencies must be > 0.
SparseOperator hph_matrix(const FockBasis& basis,
                          const std::vector<double>& freqs);

/// sum_j (c_j a*_j + conj(c_j) a_j) under hard truncation; exactly
/// Hermitian entrywise.
SparseOperator field_matrix(const FockBasis& basis,
                            const std::vector<cxd>& coeffs);

namespace detail {
/// Diagonal sum_i n_i w_i with no positivity requirement on the weights.
SparseOperator weighted_number_diag(const FockBasis& basis,
                                    const std::vector<double>& weights);
}  // namespace detail

}  // namespace irflow
