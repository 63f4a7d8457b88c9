#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "stbddc/core/sparse_lu.hpp"
#include "stbddc/fem/discretization.hpp"
#include "stbddc/fem/fields.hpp"

using namespace stbddc;

namespace {

Vector random_vector(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector v(n);
  for (double& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST(Element, MassMatchesSymbolicIntegration) {
  const double ref[4][4] = {{4, 2, 1, 2}, {2, 4, 2, 1}, {1, 2, 4, 2}, {2, 1, 2, 4}};
  auto e = element_matrices(1.0, 1.0, 0.0, 0.0, 0.0, 0.1, false);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(e.m(i, j), ref[i][j] / 36.0, 1e-15);
  // scales with h^2
  auto e2 = element_matrices(0.5, 1.0, 0.0, 0.0, 0.0, 0.1, false);
  EXPECT_NEAR(e2.m(0, 0), 0.25 * 4.0 / 36.0, 1e-15);
}

TEST(Element, DiffusionMatchesSymbolicIntegration) {
  const double ref[4][4] = {{4, -1, -2, -1}, {-1, 4, -1, -2}, {-2, -1, 4, -1}, {-1, -2, -1, 4}};
  for (double h : {1.0, 0.1}) {
    auto e = element_matrices(h, 1.0, 0.0, 0.0, 0.0, 0.1, false);
    for (int i = 0; i < 4; ++i) {
      double row = 0.0;
      for (int j = 0; j < 4; ++j) {
        EXPECT_NEAR(e.k(i, j), ref[i][j] / 6.0, 1e-14);  // h-independent in 2D
        row += e.k(i, j);
      }
      EXPECT_NEAR(row, 0.0, 1e-14);
    }
  }
}

TEST(Element, SplitConvectionIsSkewAndSupgAddsStreamlineDiffusion) {
  // element convection is 1/2 (b.grad u, v) - 1/2 (u, b.grad v)
  auto plain = element_matrices(0.1, 0.0, 1.0, 0.5, 0.0, 0.01, false);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(plain.k(i, j) + plain.k(j, i), 0.0, 1e-15);
  // by hand, beta = (1, 0.5): c01 = h/6 - 0.5 h/12, c10 = -h/6 - 0.5 h/12
  EXPECT_NEAR(plain.k(0, 1), 0.5 * ((0.1 / 6.0 - 0.05 / 12.0) - (-0.1 / 6.0 - 0.05 / 12.0)), 1e-15);
  auto e = element_matrices(0.1, 0.0, 1.0, 0.5, 0.0, 0.01, true);
  EXPECT_GT(e.tau, 0.0);
  EXPECT_NE(e.m(0, 1), plain.m(0, 1));
  // the SUPG addition tau (b.grad u, b.grad v) is symmetric and kills constants
  for (int i = 0; i < 4; ++i) {
    double row = 0.0;
    for (int j = 0; j < 4; ++j) {
      const double s_ij = e.k(i, j) - plain.k(i, j);
      EXPECT_NEAR(s_ij, e.k(j, i) - plain.k(j, i), 1e-15);
      row += s_ij;
    }
    EXPECT_NEAR(row, 0.0, 1e-15);
  }
}

TEST(Element, RejectsNonPositiveSize) {
  EXPECT_THROW(element_matrices(0.0, 1.0, 0.0, 0.0, 0.0, 0.1, false), Error);
}

TEST(SupgTau, ValuesAndHomogeneity) {
  EXPECT_DOUBLE_EQ(supg_tau(0.3, 0.0, 0.0, 0.0, 0.02), 0.02);
  const double expected = 1.0 / (300.0 + 4.0 * 1e-3 * 900.0 + 2.0 * 30.0 + 1e-4);
  EXPECT_NEAR(supg_tau(1.0 / 30, 1e-3, 1.0, 1e-4, 1.0 / 300), expected, 1e-15);
  EXPECT_NEAR(expected, 2.7503e-3, 1e-7);
  const double t1 = supg_tau(0.1, 0.01, 1.0, 0.0, 0.05);
  const double t2 = supg_tau(0.2, 0.02, 1.0, 0.0, 0.1);
  EXPECT_NEAR(t2, 2.0 * t1, 1e-15);
  // classical formula tends to h/(2|beta|) as diffusion vanishes
  EXPECT_NEAR(supg_tau(0.1, 1e-12, 2.0, 0.0, 1.0, TauFormula::kCoth), 0.1 / 4.0, 1e-9);
}

TEST(Assembly, SingleInteriorNode) {
  SpaceTimeMesh mesh(1.0, 1.0, 2, 2, 0.1, 1);
  PhysicsConfig phys;
  auto ops = assemble_spatial_operators(mesh, phys);
  const double h = 0.5;
  ASSERT_EQ(ops.mass.rows(), 1);
  EXPECT_NEAR(ops.mass.coeff(0, 0), 4.0 * h * h / 9.0, 1e-15);
  EXPECT_NEAR(ops.stiffness.coeff(0, 0), 8.0 / 3.0, 1e-14);

  Discretization disc(mesh, phys);
  Vector u{1.0}, out(1);
  disc.apply(u, out);
  EXPECT_NEAR(out[0], 4.0 * h * h / 9.0 + 0.1 * 8.0 / 3.0, 1e-14);
}

TEST(Assembly, SymmetryAndPositiveMass) {
  SpaceTimeMesh mesh(1.0, 1.0, 6, 6, 1.0, 2);
  PhysicsConfig phys;
  auto ops = assemble_spatial_operators(mesh, phys);
  auto m = ops.mass.to_dense(), k = ops.stiffness.to_dense();
  for (int i = 0; i < m.rows(); ++i) {
    double row = 0.0;
    for (int j = 0; j < m.cols(); ++j) {
      EXPECT_NEAR(m(i, j), m(j, i), 1e-16);
      EXPECT_NEAR(k(i, j), k(j, i), 1e-15);
      row += m(i, j);
    }
    EXPECT_GT(row, 0.0);
  }
  // Cholesky succeeds iff SPD
  const int n = m.rows();
  for (int j = 0; j < n; ++j) {
    double d = m(j, j);
    for (int p = 0; p < j; ++p) d -= m(j, p) * m(j, p);
    ASSERT_GT(d, 0.0);
    m(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (int p = 0; p < j; ++p) s -= m(i, p) * m(j, p);
      m(i, j) = s / m(j, j);
    }
  }
}

TEST(Assembly, ConstantInTimeTelescopes) {
  SpaceTimeMesh mesh(1.0, 1.0, 4, 4, 0.3, 3);
  PhysicsConfig phys;
  phys.beta_x = 0.4;
  Discretization disc(mesh, phys);
  const int n = disc.num_interior();
  Vector w = random_vector(n, 4);
  Vector u(3 * n), out(3 * n);
  for (int k = 0; k < 3; ++k) std::copy(w.begin(), w.end(), u.begin() + k * n);
  disc.apply(u, out);
  Vector mw = disc.mass(1) * w, kw = disc.stiffness(1) * w;
  for (int i = 0; i < n; ++i) {
    EXPECT_NEAR(out[i], mw[i] + 0.1 * kw[i], 1e-14);
    EXPECT_NEAR(out[n + i], 0.1 * kw[i], 1e-14);
    EXPECT_NEAR(out[2 * n + i], 0.1 * kw[i], 1e-14);
  }
}

TEST(Assembly, ExplicitMatrixAndTransposeAgreeWithApply) {
  SpaceTimeMesh mesh(1.0, 1.0, 5, 5, 0.4, 4);
  PhysicsConfig phys;
  phys.nu = 0.01;
  phys.beta_x = 1.0;
  phys.beta_y = -0.3;
  phys.supg = true;
  Discretization disc(mesh, phys);
  const std::size_t n = disc.size();
  Vector u = random_vector(n, 1), v = random_vector(n, 2), au(n), atv(n);
  disc.apply(u, au);
  disc.apply_transpose(v, atv);
  EXPECT_NEAR(dot(v, au), dot(atv, u), 1e-13);
  Vector au2 = disc.assemble_spacetime() * u;
  EXPECT_LE(relative_difference(au, au2), 1e-14);
}

TEST(Discretization, ReproducesSpaceTimeLinearSolutionExactly) {
  // u = 1 + 2x - y + 0.5 t lies in the discrete space; with SUPG-consistent
  // forcing f = u_t + beta.grad u + sigma u the discrete solution is exact.
  SpaceTimeMesh mesh(1.0, 1.0, 6, 6, 0.5, 5);
  PhysicsConfig phys;
  phys.nu = 0.05;
  phys.beta_x = 1.0;
  phys.beta_y = 0.5;
  phys.sigma = 0.3;
  phys.supg = true;
  auto exact = [](double x, double y, double t) { return 1.0 + 2.0 * x - y + 0.5 * t; };
  phys.dirichlet = exact;
  phys.initial = exact;
  phys.forcing = [&](double x, double y, double t) { return 0.5 + 2.0 * 1.0 - 0.5 + 0.3 * exact(x, y, t); };
  Discretization disc(mesh, phys);
  Vector b = disc.rhs();
  SparseLU lu(disc.assemble_spacetime());
  Vector u = lu.solve(b);
  const int n = disc.num_interior();
  for (int k = 1; k <= 5; ++k) {
    Vector nodal = disc.nodal_field(k, std::span<const double>(u).subspan((k - 1) * n, n));
    Vector ref = interpolate(mesh, exact, mesh.t(k));
    EXPECT_LE(max_abs(subtract(nodal, ref)), 1e-11) << "step " << k;
  }
}

TEST(Discretization, WindowMatchesFullProblemSteps) {
  SpaceTimeMesh mesh(1.0, 1.0, 5, 5, 0.4, 4);
  PhysicsConfig phys;
  auto sol = sinusoidal_solution(phys);
  phys.forcing = sol.forcing;
  Discretization disc(mesh, phys);
  SparseLU lu(disc.assemble_spacetime());
  Vector u = lu.solve(disc.rhs());
  const int n = disc.num_interior();
  // steps 3..4 started from the full solution at step 2
  auto w = disc.window(3, 2);
  EXPECT_NEAR(w.time(1), mesh.t(3), 1e-15);
  std::span<const double> u2 = std::span<const double>(u).subspan(n, n);
  Vector uw = SparseLU(w.assemble_spacetime()).solve(w.rhs(u2));
  for (int i = 0; i < 2 * n; ++i) EXPECT_NEAR(uw[i], u[2 * n + i], 1e-13);
}

TEST(Fields, SinusoidalForcingMatchesFiniteDifferences) {
  PhysicsConfig phys;
  phys.nu = 0.7;
  phys.beta_x = 0.3;
  phys.beta_y = -1.1;
  phys.sigma = 0.2;
  auto s = sinusoidal_solution(phys);
  const double e = 1e-4;
  for (auto [x, y, t] : {std::array<double, 3>{0.3, 0.6, 0.2}, {0.81, 0.12, 0.77}}) {
    auto u = s.exact;
    const double ut = (u(x, y, t + e) - u(x, y, t - e)) / (2 * e);
    const double ux = (u(x + e, y, t) - u(x - e, y, t)) / (2 * e);
    const double uy = (u(x, y + e, t) - u(x, y - e, t)) / (2 * e);
    const double lap = (u(x + e, y, t) + u(x - e, y, t) + u(x, y + e, t) + u(x, y - e, t) - 4 * u(x, y, t)) / (e * e);
    const double f = ut - 0.7 * lap + 0.3 * ux - 1.1 * uy + 0.2 * u(x, y, t);
    EXPECT_NEAR(s.forcing(x, y, t), f, 1e-5);
  }
  EXPECT_EQ(s.exact(0.3, 0.4, 0.0), 0.0);
}

TEST(Fields, PLaplacianViscosity) {
  SpaceTimeMesh mesh(1.0, 1.0, 4, 4, 1.0, 1);
  Vector lin = interpolate(mesh, [](double x, double y, double) { return x + y; }, 0.0);
  for (double v : plaplacian_viscosity(mesh, lin, 2.0, 1.0)) EXPECT_NEAR(v, 2.0 * std::sqrt(2.0), 1e-13);
  for (double v : plaplacian_viscosity(mesh, lin, 2.0, 0.0)) EXPECT_DOUBLE_EQ(v, 2.0);
  Vector c(mesh.num_nodes(), 3.0);
  for (double v : plaplacian_viscosity(mesh, c, 2.0, 1.0)) EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(Fields, L2ErrorOfBilinearInterpolantIsZero) {
  SpaceTimeMesh mesh(2.0, 1.0, 8, 4, 1.0, 1);
  auto f = [](double x, double y, double) { return 1.0 + x - 2.0 * y + 3.0 * x * y; };
  EXPECT_NEAR(l2_error(mesh, interpolate(mesh, f, 0.0), f, 0.0), 0.0, 1e-13);
  // constant offset c gives c * sqrt(area)
  Vector shifted = interpolate(mesh, f, 0.0);
  for (double& v : shifted) v += 0.5;
  EXPECT_NEAR(l2_error(mesh, shifted, f, 0.0), 0.5 * std::sqrt(2.0), 1e-13);
}

TEST(Mesh, Validation) {
  EXPECT_THROW(SpaceTimeMesh(1.0, 2.0, 4, 4, 1.0, 1), Error);
  EXPECT_THROW(SpaceTimeMesh(1.0, 1.0, 4, 4, 0.0, 1), Error);
  SpaceTimeMesh m(0.9, 0.9, 90, 90, 0.3, 30);
  EXPECT_NEAR(m.h(), 0.01, 1e-15);
  EXPECT_NEAR(m.dt(), 0.01, 1e-15);
  EXPECT_EQ(m.num_interior(), 89 * 89);
}
