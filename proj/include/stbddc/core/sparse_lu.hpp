#pragma once

#include <span>
#include <vector>

#include "stbddc/core/sparse_matrix.hpp"

namespace stbddc {

/// Left-looking sparse LU (Gilbert-Peierls) with threshold partial pivoting,
/// natural column order. P A = L U with L unit lower triangular.
///
/// Construction throws kStructurallySingular when a column has no admissible
/// pivot candidate and kNumericallySingular when the best candidate is below
/// pivot_tolerance * max|A|. A constructed factorization is never singular.
class SparseLU {
 public:
  static constexpr double kDefaultPivotTolerance = 1e-14;
  /// A diagonal entry is kept as pivot when |a_jj| >= this * max candidate.
  static constexpr double kDiagonalPreference = 0.1;

  SparseLU() = default;
  explicit SparseLU(const SparseMatrix& a, double pivot_tolerance = kDefaultPivotTolerance,
                    double diagonal_preference = kDiagonalPreference);

  int size() const { return n_; }
  std::size_t factor_nonzeros() const { return l_idx_.size() + u_idx_.size() + udiag_.size(); }

  void solve(std::span<const double> b, std::span<double> x) const;
  void solve_transpose(std::span<const double> b, std::span<double> x) const;
  void solve_in_place(std::span<double> x) const;
  void solve_transpose_in_place(std::span<double> x) const;
  Vector solve(std::span<const double> b) const;

 private:
  int n_ = 0;
  std::vector<int> pinv_;  // pinv_[row] = pivot position
  std::vector<int> l_ptr_, l_idx_;
  std::vector<double> l_val_;
  std::vector<int> u_ptr_, u_idx_;
  std::vector<double> u_val_;
  std::vector<double> udiag_;
};

inline SparseLU sparse_lu_factor(const SparseMatrix& a) { return SparseLU(a); }

}  // namespace stbddc
