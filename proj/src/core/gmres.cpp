#include "stbddc/core/gmres.hpp"

#include <cmath>

#include "stbddc/core/error.hpp"

namespace stbddc {

namespace {

void apply_givens(double c, double s, double& a, double& b) {
  const double t = c * a + s * b;
  b = -s * a + c * b;
  a = t;
}

}  // namespace

IterationReport gmres(const LinearOperator& a, const LinearOperator& preconditioner,
                      std::span<const double> b, std::span<double> x, const GmresConfig& config) {
  require(b.size() == x.size(), ErrorCode::kDimensionMismatch, "gmres: b and x differ in size");
  require(config.relative_tolerance > 0.0 && config.max_iterations >= 0, ErrorCode::kInvalidArgument,
          "gmres: bad configuration");
  const std::size_t n = b.size();
  const int cycle_max = config.restart > 0 ? config.restart : std::max(config.max_iterations, 1);

  IterationReport report;
  Vector r(n), w(n), z(n);
  auto residual = [&]() {
    a(x, w);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
    return norm2(r);
  };
  auto precondition = [&](std::span<const double> in, std::span<double> out) {
    if (preconditioner) {
      preconditioner(in, out);
    } else {
      std::copy(in.begin(), in.end(), out.begin());
    }
  };

  double beta = residual();
  report.initial_residual = beta;
  report.final_residual = beta;
  report.residual_history.push_back(beta);
  if (beta == 0.0) {
    report.converged = true;
    return report;
  }
  const double target = config.relative_tolerance * beta;
  bool arnoldi_converged = false;

  while (report.iterations < config.max_iterations) {
    const int m = std::min(cycle_max, config.max_iterations - report.iterations);
    std::vector<Vector> v;
    v.reserve(m + 1);
    v.emplace_back(r);
    scale(1.0 / beta, v[0]);
    // Hessenberg columns, already rotated.
    std::vector<Vector> h(m, Vector(m + 1, 0.0));
    Vector cs(m), sn(m), g(m + 1, 0.0);
    g[0] = beta;
    int j = 0;
    bool done = false;
    for (; j < m; ++j) {
      precondition(v[j], z);
      a(z, w);
      Vector& hj = h[j];
      // classical Gram-Schmidt, applied twice
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= j; ++i) {
          const double hij = dot(v[i], w);
          hj[i] += hij;
          axpy(-hij, v[i], w);
        }
      }
      const double hnext = norm2(w);
      hj[j + 1] = hnext;
      for (int i = 0; i < j; ++i) apply_givens(cs[i], sn[i], hj[i], hj[i + 1]);
      const double denom = std::hypot(hj[j], hj[j + 1]);
      if (denom == 0.0) {
        report.breakdown = true;
        done = true;
        break;
      }
      cs[j] = hj[j] / denom;
      sn[j] = hj[j + 1] / denom;
      hj[j] = denom;
      hj[j + 1] = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] *= cs[j];
      ++report.iterations;
      const double res = std::abs(g[j + 1]);
      report.residual_history.push_back(res);
      report.final_residual = res;
      if (res <= target) {
        done = true;
        arnoldi_converged = true;
        ++j;
        break;
      }
      if (hnext <= 1e-14 * denom) {
        // lucky breakdown: the Krylov space is invariant
        report.breakdown = true;
        done = true;
        ++j;
        break;
      }
      v.emplace_back(w);
      scale(1.0 / hnext, v.back());
    }
    // Back substitution for y, then x += B (V y).
    const int k = j;
    Vector y(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int l = i + 1; l < k; ++l) s -= h[l][i] * y[l];
      y[i] = s / h[i][i];
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (int i = 0; i < k; ++i) axpy(y[i], v[i], w);
    precondition(w, z);
    axpy(1.0, z, x);
    if (done || report.iterations >= config.max_iterations) break;
    beta = residual();
    report.final_residual = beta;
    if (beta <= target) break;
  }
  report.final_residual = residual();
  report.converged = arnoldi_converged || report.final_residual <= target ||
                     (report.breakdown && report.final_residual <= 1e-10 * report.initial_residual);
  return report;
}

}  // namespace stbddc
