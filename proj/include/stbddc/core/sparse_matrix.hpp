#pragma once

#include <span>
#include <vector>

#include "stbddc/core/dense_matrix.hpp"
#include "stbddc/core/vector_ops.hpp"

namespace stbddc {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
               std::vector<double> values);

  /// Duplicates are summed.
  static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets);
  static SparseMatrix identity(int n);
  static SparseMatrix from_dense(const DenseMatrix& a, double drop_tolerance = 0.0);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }

  std::span<const int> row_ptr() const { return row_ptr_; }
  std::span<const int> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  double coeff(int i, int j) const;

  // y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  // y += alpha A x
  void multiply_add(double alpha, std::span<const double> x, std::span<double> y) const;
  // y += alpha A^T x
  void multiply_transpose_add(double alpha, std::span<const double> x, std::span<double> y) const;
  Vector operator*(std::span<const double> x) const;

  SparseMatrix transpose() const;
  SparseMatrix scaled(double alpha) const;
  DenseMatrix to_dense() const;
  double max_abs() const;

  /// Keeps the rows and columns listed (in that order).
  SparseMatrix submatrix(std::span<const int> row_list, std::span<const int> col_list) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

/// a*A + b*B
SparseMatrix linear_combination(double a, const SparseMatrix& lhs, double b, const SparseMatrix& rhs);

}  // namespace stbddc
