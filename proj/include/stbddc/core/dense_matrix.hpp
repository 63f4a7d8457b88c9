#pragma once

#include <span>
#include <vector>

#include "stbddc/core/vector_ops.hpp"

namespace stbddc {

/// Row-major dense matrix. Used for Schur complements, the coarse matrix and
/// the explicit coarse bases.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols, double fill = 0.0);

  static DenseMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  std::span<double> row(int i) { return {data_.data() + static_cast<std::size_t>(i) * cols_, static_cast<std::size_t>(cols_)}; }
  std::span<const double> row(int i) const {
    return {data_.data() + static_cast<std::size_t>(i) * cols_, static_cast<std::size_t>(cols_)};
  }
  std::span<const double> data() const { return data_; }

  Vector column(int j) const;
  void set_column(int j, std::span<const double> values);

  // y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  // y = A^T x
  void multiply_transpose(std::span<const double> x, std::span<double> y) const;

  DenseMatrix transpose() const;
  double max_abs() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);

/// LU factorization with partial pivoting. Throws kNumericallySingular when a
/// pivot falls below pivot_tolerance * max|A|.
class DenseLU {
 public:
  static constexpr double kDefaultPivotTolerance = 1e-14;

  DenseLU() = default;
  explicit DenseLU(DenseMatrix a, double pivot_tolerance = kDefaultPivotTolerance);

  int size() const { return lu_.rows(); }

  void solve(std::span<const double> b, std::span<double> x) const;
  void solve_transpose(std::span<const double> b, std::span<double> x) const;
  Vector solve(std::span<const double> b) const;

  DenseMatrix inverse() const;
  /// Smallest |U_ii| divided by the largest, a cheap conditioning indicator.
  double pivot_ratio() const;

 private:
  DenseMatrix lu_;
  std::vector<int> perm_;  // row i of PA is row perm_[i] of A
};

/// Numerical rank via Gaussian elimination with complete pivoting.
int numerical_rank(DenseMatrix a, double relative_tolerance = 1e-10);

}  // namespace stbddc
