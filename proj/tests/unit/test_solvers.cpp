#include <gtest/gtest.h>

#include "stbddc/fem/fields.hpp"
#include "stbddc/solvers/solvers.hpp"

using namespace stbddc;

namespace {

PhysicsConfig sinusoidal_physics(double nu, double bx) {
  PhysicsConfig p;
  p.nu = nu;
  p.beta_x = bx;
  p.supg = bx != 0.0;
  p.forcing = sinusoidal_solution(p).forcing;
  return p;
}

}  // namespace

TEST(Solvers, SpaceTimeSequentialAndDirectAgree) {
  Discretization disc(SpaceTimeMesh(1.0, 1.0, 12, 12, 1.0, 8), sinusoidal_physics(0.1, 1.0));
  const Vector b = disc.rhs();
  const Vector direct = solve_monolithic_direct(disc, b);
  EXPECT_LE(relative_difference(solve_stepping_direct(disc), direct), 1e-12);

  SolverConfig cfg;
  SpaceTimePartition part(disc.mesh(), 3, 2, 2);
  SolveReport st;
  const Vector u = solve_spacetime(disc, part, b, cfg, st);
  EXPECT_TRUE(st.converged);
  EXPECT_LE(relative_difference(u, direct), 1e-6);
  EXPECT_EQ(st.local_solves, static_cast<long long>(st.linear_iterations) * part.steps_per_slab());
  ASSERT_EQ(st.residual_histories.size(), 1u);
  EXPECT_LE(st.residual_histories[0].back(), 1e-6 * st.residual_histories[0].front());

  SolveReport seq;
  const Vector us = solve_sequential(disc, 3, 2, cfg, seq);
  EXPECT_TRUE(seq.converged);
  EXPECT_EQ(seq.linear_solves, 8);
  EXPECT_EQ(seq.local_solves, seq.linear_iterations);
  EXPECT_LE(relative_difference(us, direct), 1e-6);

  // the simplified form with the interior-correction start reaches the same answer
  cfg.initial_guess = InitialGuess::kInteriorCorrection;
  SolveReport ic;
  EXPECT_LE(relative_difference(solve_spacetime(disc, part, b, cfg, ic), direct), 1e-6);
  EXPECT_TRUE(ic.converged);
}

TEST(Solvers, SingleSubdomainConvergesInOneIteration) {
  Discretization disc(SpaceTimeMesh(1.0, 1.0, 8, 8, 1.0, 6), sinusoidal_physics(1.0, 0.0));
  SpaceTimePartition part(disc.mesh(), 1, 1, 1);
  for (InitialGuess g : {InitialGuess::kAuto, InitialGuess::kInteriorCorrection, InitialGuess::kZero}) {
    SolverConfig cfg;
    cfg.initial_guess = g;
    SolveReport rep;
    solve_spacetime(disc, part, disc.rhs(), cfg, rep);
    EXPECT_EQ(rep.linear_iterations, 1);
  }
  SolveReport seq;
  solve_sequential(disc, 1, 1, SolverConfig{}, seq);
  for (int it : seq.iterations_per_solve) EXPECT_EQ(it, 1);
}

TEST(Solvers, OneStepSequentialEqualsSpaceTime) {
  Discretization disc(SpaceTimeMesh(1.0, 1.0, 9, 9, 0.1, 1), sinusoidal_physics(0.5, 0.5));
  SolverConfig cfg;
  cfg.gmres.relative_tolerance = 1e-10;
  SolveReport a, b;
  const Vector st = solve_spacetime(disc, SpaceTimePartition(disc.mesh(), 3, 3, 1), disc.rhs(), cfg, a);
  const Vector sq = solve_sequential(disc, 3, 3, cfg, b);
  EXPECT_LE(relative_difference(st, sq), 1e-8);
}

TEST(Solvers, ZeroRhsAndSizeCap) {
  Discretization disc(SpaceTimeMesh(1.0, 1.0, 6, 6, 1.0, 4), PhysicsConfig{});
  const Vector zero(disc.size(), 0.0);
  EXPECT_EQ(max_abs(solve_monolithic_direct(disc, zero)), 0.0);
  try {
    solve_monolithic_direct(disc, zero, 10);
    FAIL() << "size cap not enforced";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSizeCapExceeded);
  }
  SolveReport rep;
  const Vector u = solve_spacetime(disc, SpaceTimePartition(disc.mesh(), 2, 2, 2), zero, SolverConfig{}, rep);
  EXPECT_EQ(max_abs(u), 0.0);
}

TEST(Solvers, NonConvergenceIsReported) {
  Discretization disc(SpaceTimeMesh(1.0, 1.0, 12, 12, 1.0, 8), sinusoidal_physics(1.0, 0.0));
  SolverConfig cfg;
  cfg.gmres.max_iterations = 2;
  SolveReport rep;
  solve_spacetime(disc, SpaceTimePartition(disc.mesh(), 3, 3, 2), disc.rhs(), cfg, rep);
  EXPECT_FALSE(rep.converged);
  EXPECT_FALSE(rep.message.empty());
}

TEST(Picard, LinearProblemTakesOneIteration) {
  // p = 0: nu = nu0 regardless of the iterate; with no relaxation the first
  // linear solve is the answer
  PhysicsConfig phys;
  phys.nonlinear = true;
  phys.nu0 = 0.7;
  phys.p = 0.0;
  phys.forcing = constant_field(1.0);
  SpaceTimeMesh mesh(1.0, 1.0, 8, 8, 0.1, 4);
  SolverConfig cfg;
  cfg.gmres.relative_tolerance = 1e-12;
  NonlinearConfig nl;
  nl.relaxation = 1.0;
  SolveReport rep;
  const Vector u = solve_picard_spacetime(mesh, phys, 2, 2, 2, cfg, nl, rep);
  EXPECT_TRUE(rep.converged);
  EXPECT_EQ(rep.picard_iterations, 1);

  PhysicsConfig lin = phys;
  lin.nonlinear = false;
  lin.nu = 0.7;
  Discretization disc(mesh, lin);
  EXPECT_LE(relative_difference(u, solve_monolithic_direct(disc, disc.rhs())), 1e-9);
}

TEST(Picard, SpaceTimeAndSequentialAgree) {
  PhysicsConfig phys;
  phys.nonlinear = true;
  phys.nu0 = 1.0;
  phys.p = 1.0;
  auto g = [](double x, double y, double) { return x + y; };
  phys.dirichlet = g;
  phys.initial = g;
  phys.forcing = constant_field(1.0);
  SpaceTimeMesh mesh(1.0, 1.0, 8, 8, 0.008, 8);
  SolverConfig cfg;
  NonlinearConfig nl;
  SolveReport st, sq;
  const Vector a = solve_picard_spacetime(mesh, phys, 2, 2, 2, cfg, nl, st);
  const Vector b = solve_picard_sequential(mesh, phys, 2, 2, cfg, nl, sq);
  EXPECT_TRUE(st.converged);
  EXPECT_TRUE(sq.converged);
  EXPECT_LE(st.picard_iterations, 30);
  EXPECT_LE(st.nonlinear_residuals.back(), nl.tolerance * st.nonlinear_residuals.front());
  EXPECT_LE(relative_difference(a, b), 1e-3);
}

TEST(Picard, RejectsBadRelaxation) {
  PhysicsConfig phys;
  phys.nonlinear = true;
  SpaceTimeMesh mesh(1.0, 1.0, 4, 4, 0.1, 2);
  NonlinearConfig nl;
  nl.relaxation = 1.5;
  SolveReport rep;
  EXPECT_THROW(solve_picard_spacetime(mesh, phys, 2, 2, 1, SolverConfig{}, nl, rep), Error);
}

TEST(Picard, ViscosityOfConstantIterateIsNu0) {
  PhysicsConfig phys;
  phys.nonlinear = true;
  phys.nu0 = 2.0;
  phys.p = 1.0;
  auto g = [](double x, double y, double) { return 3.0 * x + 4.0 * y; };
  phys.dirichlet = g;
  SpaceTimeMesh mesh(1.0, 1.0, 4, 4, 0.2, 2);
  // interior values of the same linear field: |grad u| = 5 on every cell
  Vector u(2 * mesh.num_interior());
  for (int k = 0; k < 2; ++k)
    for (int j = 1; j < 4; ++j)
      for (int i = 1; i < 4; ++i) u[k * mesh.num_interior() + mesh.interior_index(i, j)] = g(mesh.x(i), mesh.y(j), 0);
  const auto nu = viscosity_of(mesh, phys, u);
  ASSERT_EQ(nu.size(), 2u);
  for (const auto& step : nu)
    for (double v : step) EXPECT_NEAR(v, 10.0, 1e-12);
}
