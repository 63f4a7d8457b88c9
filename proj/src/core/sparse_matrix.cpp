#include "stbddc/core/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>

namespace stbddc {

SparseMatrix::SparseMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
                           std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  require(rows >= 0 && cols >= 0, ErrorCode::kInvalidArgument, "SparseMatrix: negative dimension");
  require(static_cast<int>(row_ptr_.size()) == rows + 1 && row_ptr_.front() == 0 &&
              row_ptr_.back() == static_cast<int>(col_idx_.size()) &&
              col_idx_.size() == values_.size(),
          ErrorCode::kDimensionMismatch, "SparseMatrix: inconsistent CSR arrays");
  for (int i = 0; i < rows; ++i) {
    require(row_ptr_[i] <= row_ptr_[i + 1], ErrorCode::kInvalidArgument, "SparseMatrix: row_ptr");
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      require(col_idx_[k] >= 0 && col_idx_[k] < cols, ErrorCode::kInvalidArgument,
              "SparseMatrix: column index out of range");
      require(k == row_ptr_[i] || col_idx_[k] > col_idx_[k - 1], ErrorCode::kInvalidArgument,
              "SparseMatrix: column indices not strictly increasing");
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<int> row_ptr(rows + 1, 0);
  std::vector<int> col_idx;
  std::vector<double> values;
  col_idx.reserve(triplets.size());
  values.reserve(triplets.size());
  int last_row = -1, last_col = -1;
  for (const Triplet& t : triplets) {
    require(t.row >= 0 && t.row < rows && t.col >= 0 && t.col < cols, ErrorCode::kInvalidArgument,
            "from_triplets: index out of range");
    if (t.row == last_row && t.col == last_col) {
      values.back() += t.value;
      continue;
    }
    col_idx.push_back(t.col);
    values.push_back(t.value);
    ++row_ptr[t.row + 1];
    last_row = t.row;
    last_col = t.col;
  }
  for (int i = 0; i < rows; ++i) row_ptr[i + 1] += row_ptr[i];
  return SparseMatrix(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

SparseMatrix SparseMatrix::identity(int n) {
  std::vector<int> row_ptr(n + 1), col_idx(n);
  for (int i = 0; i <= n; ++i) row_ptr[i] = i;
  for (int i = 0; i < n; ++i) col_idx[i] = i;
  return SparseMatrix(n, n, std::move(row_ptr), std::move(col_idx), std::vector<double>(n, 1.0));
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& a, double drop_tolerance) {
  std::vector<Triplet> t;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (std::abs(a(i, j)) > drop_tolerance) t.push_back({i, j, a(i, j)});
  return from_triplets(a.rows(), a.cols(), std::move(t));
}

double SparseMatrix::coeff(int i, int j) const {
  const auto first = col_idx_.begin() + row_ptr_[i];
  const auto last = col_idx_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[it - col_idx_.begin()];
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  require(static_cast<int>(x.size()) == cols_ && static_cast<int>(y.size()) == rows_,
          ErrorCode::kDimensionMismatch, "SparseMatrix::multiply");
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * x[col_idx_[k]];
    y[i] = s;
  }
}

void SparseMatrix::multiply_add(double alpha, std::span<const double> x, std::span<double> y) const {
  require(static_cast<int>(x.size()) == cols_ && static_cast<int>(y.size()) == rows_,
          ErrorCode::kDimensionMismatch, "SparseMatrix::multiply_add");
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * x[col_idx_[k]];
    y[i] += alpha * s;
  }
}

void SparseMatrix::multiply_transpose_add(double alpha, std::span<const double> x,
                                          std::span<double> y) const {
  require(static_cast<int>(x.size()) == rows_ && static_cast<int>(y.size()) == cols_,
          ErrorCode::kDimensionMismatch, "SparseMatrix::multiply_transpose_add");
  for (int i = 0; i < rows_; ++i) {
    const double xi = alpha * x[i];
    if (xi == 0.0) continue;
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) y[col_idx_[k]] += values_[k] * xi;
  }
}

Vector SparseMatrix::operator*(std::span<const double> x) const {
  Vector y(rows_);
  multiply(x, y);
  return y;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<int> row_ptr(cols_ + 1, 0);
  for (int c : col_idx_) ++row_ptr[c + 1];
  for (int j = 0; j < cols_; ++j) row_ptr[j + 1] += row_ptr[j];
  std::vector<int> next(row_ptr.begin(), row_ptr.end() - 1);
  std::vector<int> col_idx(values_.size());
  std::vector<double> values(values_.size());
  for (int i = 0; i < rows_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const int dst = next[col_idx_[k]]++;
      col_idx[dst] = i;
      values[dst] = values_[k];
    }
  return SparseMatrix(cols_, rows_, std::move(row_ptr), std::move(col_idx), std::move(values));
}

SparseMatrix SparseMatrix::scaled(double alpha) const {
  SparseMatrix s = *this;
  for (double& v : s.values_) v *= alpha;
  return s;
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) d(i, col_idx_[k]) = values_[k];
  return d;
}

double SparseMatrix::max_abs() const { return stbddc::max_abs(values_); }

SparseMatrix SparseMatrix::submatrix(std::span<const int> row_list, std::span<const int> col_list) const {
  std::vector<int> col_map(cols_, -1);
  for (std::size_t j = 0; j < col_list.size(); ++j) col_map[col_list[j]] = static_cast<int>(j);
  std::vector<Triplet> t;
  for (std::size_t ii = 0; ii < row_list.size(); ++ii) {
    const int i = row_list[ii];
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const int j = col_map[col_idx_[k]];
      if (j >= 0) t.push_back({static_cast<int>(ii), j, values_[k]});
    }
  }
  return from_triplets(static_cast<int>(row_list.size()), static_cast<int>(col_list.size()),
                       std::move(t));
}

SparseMatrix linear_combination(double a, const SparseMatrix& lhs, double b, const SparseMatrix& rhs) {
  require(lhs.rows() == rhs.rows() && lhs.cols() == rhs.cols(), ErrorCode::kDimensionMismatch,
          "linear_combination: shapes differ");
  std::vector<int> row_ptr(lhs.rows() + 1, 0);
  std::vector<int> col_idx;
  std::vector<double> values;
  col_idx.reserve(lhs.nonzeros() + rhs.nonzeros());
  values.reserve(lhs.nonzeros() + rhs.nonzeros());
  const auto lp = lhs.row_ptr(), rp = rhs.row_ptr();
  const auto lc = lhs.col_idx(), rc = rhs.col_idx();
  const auto lv = lhs.values(), rv = rhs.values();
  for (int i = 0; i < lhs.rows(); ++i) {
    int p = lp[i], q = rp[i];
    while (p < lp[i + 1] || q < rp[i + 1]) {
      if (q >= rp[i + 1] || (p < lp[i + 1] && lc[p] < rc[q])) {
        col_idx.push_back(lc[p]);
        values.push_back(a * lv[p++]);
      } else if (p >= lp[i + 1] || rc[q] < lc[p]) {
        col_idx.push_back(rc[q]);
        values.push_back(b * rv[q++]);
      } else {
        col_idx.push_back(lc[p]);
        values.push_back(a * lv[p++] + b * rv[q++]);
      }
    }
    row_ptr[i + 1] = static_cast<int>(col_idx.size());
  }
  return SparseMatrix(lhs.rows(), lhs.cols(), std::move(row_ptr), std::move(col_idx), std::move(values));
}

}  // namespace stbddc
