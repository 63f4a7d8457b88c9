#include "stbddc/core/sparse_lu.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stbddc {

SparseLU::SparseLU(const SparseMatrix& a, double pivot_tolerance, double diagonal_preference)
    : n_(a.rows()) {
  require(a.rows() == a.cols(), ErrorCode::kDimensionMismatch, "SparseLU: matrix not square");
  const int n = n_;
  const SparseMatrix at = a.transpose();  // CSR of A^T == CSC of A
  const auto a_ptr = at.row_ptr();
  const auto a_idx = at.col_idx();
  const auto a_val = at.values();
  const double threshold = pivot_tolerance * a.max_abs();

  pinv_.assign(n, -1);
  l_ptr_.assign(n + 1, 0);
  u_ptr_.assign(n + 1, 0);
  udiag_.assign(n, 0.0);
  l_idx_.reserve(a.nonzeros());
  l_val_.reserve(a.nonzeros());
  u_idx_.reserve(a.nonzeros());
  u_val_.reserve(a.nonzeros());

  std::vector<double> x(n, 0.0);
  std::vector<int> mark(n, -1);
  std::vector<int> reach(n);
  std::vector<int> stack(n);
  std::vector<int> child(n);

  for (int j = 0; j < n; ++j) {
    // Symbolic: rows reachable from the pattern of A(:,j) through the graph of L,
    // stored in topological order in reach[top, n).
    int top = n;
    for (int p = a_ptr[j]; p < a_ptr[j + 1]; ++p) {
      const int start = a_idx[p];
      if (mark[start] == j) continue;
      int head = 0;
      stack[0] = start;
      while (head >= 0) {
        const int i = stack[head];
        const int k = pinv_[i];
        if (mark[i] != j) {
          mark[i] = j;
          child[i] = k >= 0 ? l_ptr_[k] : 0;
        }
        bool done = true;
        if (k >= 0) {
          const int end = l_ptr_[k + 1];
          for (int q = child[i]; q < end; ++q) {
            const int r = l_idx_[q];
            if (mark[r] == j) continue;
            child[i] = q + 1;
            stack[++head] = r;
            done = false;
            break;
          }
        }
        if (done) {
          --head;
          reach[--top] = i;
        }
      }
    }

    // Numeric: x = L \ A(:,j) restricted to the reach.
    for (int t = top; t < n; ++t) x[reach[t]] = 0.0;
    for (int p = a_ptr[j]; p < a_ptr[j + 1]; ++p) x[a_idx[p]] = a_val[p];
    for (int t = top; t < n; ++t) {
      const int i = reach[t];
      const int k = pinv_[i];
      if (k < 0) continue;
      const double xi = x[i];
      if (xi == 0.0) continue;
      for (int q = l_ptr_[k]; q < l_ptr_[k + 1]; ++q) x[l_idx_[q]] -= l_val_[q] * xi;
    }

    // Pivot selection among unpivoted rows.
    int ipiv = -1;
    double best = -1.0;
    bool has_candidate = false;
    for (int t = top; t < n; ++t) {
      const int i = reach[t];
      if (pinv_[i] >= 0) {
        if (x[i] != 0.0) {
          u_idx_.push_back(pinv_[i]);
          u_val_.push_back(x[i]);
        }
      } else {
        has_candidate = true;
        if (std::abs(x[i]) > best) {
          best = std::abs(x[i]);
          ipiv = i;
        }
      }
    }
    if (!has_candidate) {
      throw Error(ErrorCode::kStructurallySingular, "SparseLU: no pivot candidate in column " + std::to_string(j));
    }
    if (pinv_[j] < 0 && mark[j] == j && std::abs(x[j]) >= diagonal_preference * best) ipiv = j;
    const double pivot = x[ipiv];
    if (std::abs(pivot) <= threshold || pivot == 0.0) {
      throw Error(ErrorCode::kNumericallySingular,
                  "SparseLU: pivot " + std::to_string(std::abs(pivot)) + " in column " + std::to_string(j));
    }
    pinv_[ipiv] = j;
    udiag_[j] = pivot;
    for (int t = top; t < n; ++t) {
      const int i = reach[t];
      if (pinv_[i] < 0 && x[i] != 0.0) {
        l_idx_.push_back(i);
        l_val_.push_back(x[i] / pivot);
      }
    }
    l_ptr_[j + 1] = static_cast<int>(l_idx_.size());
    u_ptr_[j + 1] = static_cast<int>(u_idx_.size());
  }
  for (int& i : l_idx_) i = pinv_[i];
}

void SparseLU::solve_in_place(std::span<double> y) const {
  require(static_cast<int>(y.size()) == n_, ErrorCode::kDimensionMismatch, "SparseLU::solve");
  Vector b(y.begin(), y.end());
  for (int i = 0; i < n_; ++i) y[pinv_[i]] = b[i];
  for (int j = 0; j < n_; ++j) {
    const double yj = y[j];
    if (yj == 0.0) continue;
    for (int p = l_ptr_[j]; p < l_ptr_[j + 1]; ++p) y[l_idx_[p]] -= l_val_[p] * yj;
  }
  for (int j = n_ - 1; j >= 0; --j) {
    const double yj = (y[j] /= udiag_[j]);
    if (yj == 0.0) continue;
    for (int p = u_ptr_[j]; p < u_ptr_[j + 1]; ++p) y[u_idx_[p]] -= u_val_[p] * yj;
  }
}

void SparseLU::solve_transpose_in_place(std::span<double> w) const {
  // A^T = U^T L^T P: solve U^T w = b, L^T z = w, then x = P^T z.
  require(static_cast<int>(w.size()) == n_, ErrorCode::kDimensionMismatch, "SparseLU::solve_transpose");
  for (int j = 0; j < n_; ++j) {
    double s = w[j];
    for (int p = u_ptr_[j]; p < u_ptr_[j + 1]; ++p) s -= u_val_[p] * w[u_idx_[p]];
    w[j] = s / udiag_[j];
  }
  for (int j = n_ - 1; j >= 0; --j) {
    double s = w[j];
    for (int p = l_ptr_[j]; p < l_ptr_[j + 1]; ++p) s -= l_val_[p] * w[l_idx_[p]];
    w[j] = s;
  }
  const Vector z(w.begin(), w.end());
  for (int i = 0; i < n_; ++i) w[i] = z[pinv_[i]];
}

void SparseLU::solve(std::span<const double> b, std::span<double> x) const {
  require(b.size() == x.size(), ErrorCode::kDimensionMismatch, "SparseLU::solve");
  std::copy(b.begin(), b.end(), x.begin());
  solve_in_place(x);
}

void SparseLU::solve_transpose(std::span<const double> b, std::span<double> x) const {
  require(b.size() == x.size(), ErrorCode::kDimensionMismatch, "SparseLU::solve_transpose");
  std::copy(b.begin(), b.end(), x.begin());
  solve_transpose_in_place(x);
}

Vector SparseLU::solve(std::span<const double> b) const {
  Vector x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

}  // namespace stbddc
