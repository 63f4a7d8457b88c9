#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "stbddc/core/error.hpp"

namespace stbddc {

using Vector = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorCode::kDimensionMismatch, "dot: sizes differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require(x.size() == y.size(), ErrorCode::kDimensionMismatch, "axpy: sizes differ");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(double alpha, std::span<double> x) {
  for (double& v : x) v *= alpha;
}

inline Vector subtract(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorCode::kDimensionMismatch, "subtract: sizes differ");
  Vector c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
  return c;
}

inline double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// ||a - b|| / ||b||, with ||b|| == 0 falling back to the absolute difference.
inline double relative_difference(std::span<const double> a, std::span<const double> b) {
  const Vector d = subtract(a, b);
  const double nb = norm2(b);
  return nb > 0.0 ? norm2(d) / nb : norm2(d);
}

}  // namespace stbddc
