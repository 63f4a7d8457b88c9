#include "stbddc/core/dense_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stbddc {

DenseMatrix::DenseMatrix(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {
  require(rows >= 0 && cols >= 0, ErrorCode::kInvalidArgument, "DenseMatrix: negative dimension");
}

DenseMatrix DenseMatrix::identity(int n) {
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector DenseMatrix::column(int j) const {
  Vector c(rows_);
  for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

void DenseMatrix::set_column(int j, std::span<const double> values) {
  require(static_cast<int>(values.size()) == rows_, ErrorCode::kDimensionMismatch, "set_column");
  for (int i = 0; i < rows_; ++i) (*this)(i, j) = values[i];
}

void DenseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  require(static_cast<int>(x.size()) == cols_ && static_cast<int>(y.size()) == rows_,
          ErrorCode::kDimensionMismatch, "DenseMatrix::multiply");
  for (int i = 0; i < rows_; ++i) {
    const auto r = row(i);
    double s = 0.0;
    for (int j = 0; j < cols_; ++j) s += r[j] * x[j];
    y[i] = s;
  }
}

void DenseMatrix::multiply_transpose(std::span<const double> x, std::span<double> y) const {
  require(static_cast<int>(x.size()) == rows_ && static_cast<int>(y.size()) == cols_,
          ErrorCode::kDimensionMismatch, "DenseMatrix::multiply_transpose");
  std::fill(y.begin(), y.end(), 0.0);
  for (int i = 0; i < rows_; ++i) {
    const auto r = row(i);
    for (int j = 0; j < cols_; ++j) y[j] += r[j] * x[i];
  }
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double DenseMatrix::max_abs() const { return stbddc::max_abs(data_); }

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(), ErrorCode::kDimensionMismatch, "DenseMatrix product");
  DenseMatrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::kDimensionMismatch,
          "DenseMatrix difference");
  DenseMatrix c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

DenseLU::DenseLU(DenseMatrix a, double pivot_tolerance) : lu_(std::move(a)) {
  require(lu_.rows() == lu_.cols(), ErrorCode::kDimensionMismatch, "DenseLU: matrix not square");
  const int n = lu_.rows();
  perm_.resize(n);
  std::iota(perm_.begin(), perm_.end(), 0);
  const double threshold = pivot_tolerance * lu_.max_abs();
  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::abs(lu_(k, k));
    for (int i = k + 1; i < n; ++i) {
      if (std::abs(lu_(i, k)) > best) {
        best = std::abs(lu_(i, k));
        p = i;
      }
    }
    if (best <= threshold || best == 0.0) {
      throw Error(ErrorCode::kNumericallySingular,
                  "DenseLU: pivot " + std::to_string(best) + " at column " + std::to_string(k));
    }
    if (p != k) {
      std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(p).begin());
      std::swap(perm_[k], perm_[p]);
    }
    const double pivot = lu_(k, k);
    for (int i = k + 1; i < n; ++i) {
      const double l = lu_(i, k) / pivot;
      lu_(i, k) = l;
      if (l == 0.0) continue;
      auto ri = lu_.row(i);
      const auto rk = lu_.row(k);
      for (int j = k + 1; j < n; ++j) ri[j] -= l * rk[j];
    }
  }
}

void DenseLU::solve(std::span<const double> b, std::span<double> x) const {
  const int n = size();
  require(static_cast<int>(b.size()) == n && static_cast<int>(x.size()) == n,
          ErrorCode::kDimensionMismatch, "DenseLU::solve");
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    double s = b[perm_[i]];
    const auto r = lu_.row(i);
    for (int j = 0; j < i; ++j) s -= r[j] * y[j];
    y[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = y[i];
    const auto r = lu_.row(i);
    for (int j = i + 1; j < n; ++j) s -= r[j] * y[j];
    y[i] = s / r[i];
  }
  std::copy(y.begin(), y.end(), x.begin());
}

void DenseLU::solve_transpose(std::span<const double> b, std::span<double> x) const {
  // A^T = U^T L^T P, so solve U^T w = b, L^T z = w, x = P^T z.
  const int n = size();
  require(static_cast<int>(b.size()) == n && static_cast<int>(x.size()) == n,
          ErrorCode::kDimensionMismatch, "DenseLU::solve_transpose");
  Vector w(b.begin(), b.end());
  for (int i = 0; i < n; ++i) {
    w[i] /= lu_(i, i);
    for (int j = i + 1; j < n; ++j) w[j] -= lu_(i, j) * w[i];
  }
  for (int i = n - 1; i >= 0; --i) {
    for (int j = 0; j < i; ++j) w[j] -= lu_(i, j) * w[i];
  }
  for (int i = 0; i < n; ++i) x[perm_[i]] = w[i];
}

Vector DenseLU::solve(std::span<const double> b) const {
  Vector x(b.size());
  solve(b, x);
  return x;
}

DenseMatrix DenseLU::inverse() const {
  const int n = size();
  DenseMatrix inv(n, n);
  Vector e(n), x(n);
  for (int j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    solve(e, x);
    inv.set_column(j, x);
  }
  return inv;
}

double DenseLU::pivot_ratio() const {
  if (size() == 0) return 1.0;
  double lo = std::abs(lu_(0, 0)), hi = lo;
  for (int i = 1; i < size(); ++i) {
    lo = std::min(lo, std::abs(lu_(i, i)));
    hi = std::max(hi, std::abs(lu_(i, i)));
  }
  return lo / hi;
}

int numerical_rank(DenseMatrix a, double relative_tolerance) {
  const int m = a.rows(), n = a.cols();
  const double threshold = relative_tolerance * a.max_abs();
  int rank = 0;
  std::vector<int> colp(n);
  std::iota(colp.begin(), colp.end(), 0);
  for (int k = 0; k < std::min(m, n); ++k) {
    int pi = -1, pj = -1;
    double best = threshold;
    for (int i = k; i < m; ++i)
      for (int j = k; j < n; ++j)
        if (std::abs(a(i, colp[j])) > best) {
          best = std::abs(a(i, colp[j]));
          pi = i;
          pj = j;
        }
    if (pi < 0) break;
    std::swap_ranges(a.row(k).begin(), a.row(k).end(), a.row(pi).begin());
    std::swap(colp[k], colp[pj]);
    const double pivot = a(k, colp[k]);
    for (int i = k + 1; i < m; ++i) {
      const double l = a(i, colp[k]) / pivot;
      if (l == 0.0) continue;
      for (int j = k; j < n; ++j) a(i, colp[j]) -= l * a(k, colp[j]);
    }
    ++rank;
  }
  return rank;
}

}  // namespace stbddc
