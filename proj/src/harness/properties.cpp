#include "stbddc/harness/properties.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "stbddc/core/sparse_lu.hpp"
#include "stbddc/dd/preconditioner.hpp"
#include "stbddc/fem/fields.hpp"
#include "stbddc/solvers/solvers.hpp"

namespace stbddc {

namespace {

using Clock = std::chrono::steady_clock;

Vector random_vector(std::size_t n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector v(n);
  for (double& x : v) x = u(rng);
  return v;
}

PhysicsConfig cdr(bool supg) {
  PhysicsConfig p;
  p.nu = 0.05;
  p.beta_x = 1.0;
  p.beta_y = 0.4;
  p.sigma = 0.1;
  p.supg = supg;
  return p;
}

PhysicsConfig oracle_physics() {
  PhysicsConfig p;
  p.nu = 0.01;
  p.beta_x = 1.0;
  p.beta_y = 0.5;
  p.sigma = 0.1;
  p.supg = true;
  p.forcing = sinusoidal_solution(p).forcing;
  return p;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

template <class F>
PropertyResult timed(const std::string& name, F&& body) {
  PropertyResult r;
  r.name = name;
  const auto t0 = Clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

}  // namespace

PropertyResult check_assembly_equivalence(unsigned seed, const VerifyHooks& hooks, int vectors) {
  return timed("assembly_equivalence", [&](PropertyResult& r) {
    Discretization disc(SpaceTimeMesh(1.0, 1.0, 12, 12, 1.0, 8), cdr(true));
    SpaceTimePartition part(disc.mesh(), 2, 2, 2);
    StbddcOptions opt;
    opt.signs = hooks.signs;
    opt.threads = 1;
    StbddcPreconditioner pre(disc, part, opt);
    std::mt19937 rng(seed);
    double worst = 0.0;
    std::vector<Vector> local(pre.num_subdomains());
    Vector assembled(disc.size()), ref(disc.size());
    for (int v = 0; v < vectors; ++v) {
      const Vector u = random_vector(disc.size(), rng);
      for (int sid = 0; sid < pre.num_subdomains(); ++sid) {
        Vector ul(pre.subdomain(sid).size());
        pre.restrict_to(sid, u, ul);
        local[sid].resize(ul.size());
        pre.subdomain(sid).apply(ul, local[sid]);
      }
      pre.assemble(local, assembled);
      disc.apply(u, ref);
      worst = std::max(worst, relative_difference(assembled, ref));
    }
    r.passed = worst <= 1e-12;
    r.detail = "max relative discrepancy " + fmt(worst) + " over " + std::to_string(vectors) + " vectors";
  });
}

PropertyResult check_positivity(unsigned seed, int vectors_per_subdomain) {
  return timed("positivity", [&](PropertyResult& r) {
    Discretization disc(SpaceTimeMesh(1.0, 1.0, 18, 18, 1.0, 12), cdr(true));
    SpaceTimePartition part(disc.mesh(), 3, 3, 3);
    StbddcOptions opt;
    opt.threads = 1;
    StbddcPreconditioner pre(disc, part, opt);
    std::mt19937 rng(seed);
    double smallest = INFINITY;
    int failures = 0;
    for (int sid = 0; sid < pre.num_subdomains(); ++sid) {
      const SubdomainOperator& op = pre.subdomain(sid);
      Vector au(op.size());
      for (int v = 0; v < vectors_per_subdomain; ++v) {
        const Vector u = random_vector(op.size(), rng);
        op.apply(u, au);
        const double q = dot(u, au) / dot(u, u);
        smallest = std::min(smallest, q);
        if (!(q > 0.0)) ++failures;
      }
    }
    r.passed = failures == 0;
    r.detail = std::to_string(pre.num_subdomains()) + " subdomains, min u.Au/u.u = " + fmt(smallest) + ", " +
               std::to_string(failures) + " non-positive";
  });
}

PropertyResult check_energy_identity(unsigned seed, int vectors) {
  return timed("energy_identity", [&](PropertyResult& r) {
    // the identity needs a symmetric mass matrix: no SUPG
    Discretization disc(SpaceTimeMesh(1.0, 1.0, 10, 10, 0.5, 6), cdr(false));
    const int n = disc.num_interior(), steps = disc.num_steps();
    const double dt = disc.dt();
    std::mt19937 rng(seed);
    double worst = 0.0;
    Vector au(disc.size());
    for (int v = 0; v < vectors; ++v) {
      const Vector u = random_vector(disc.size(), rng);
      disc.apply(u, au);
      const double got = dot(u, au);
      double expected = 0.0;
      Vector prev(n, 0.0);
      for (int k = 1; k <= steps; ++k) {
        const Vector cur(u.begin() + (k - 1) * n, u.begin() + k * n);
        const Vector d = subtract(cur, prev);
        expected += 0.5 * dot(d, disc.mass(k) * d) + dt * dot(cur, disc.stiffness(k) * cur);
        prev = cur;
      }
      expected += 0.5 * dot(prev, disc.mass(steps) * prev);
      worst = std::max(worst, std::abs(got - expected) / std::abs(expected));
    }

    // same identity per subdomain for the perturbed local operators
    Discretization local_disc(SpaceTimeMesh(1.0, 1.0, 6, 6, 0.5, 6), cdr(false));
    SpaceTimePartition part(local_disc.mesh(), 3, 2, 3);
    StbddcOptions opt;
    opt.threads = 1;
    StbddcPreconditioner pre(local_disc, part, opt);
    for (int sid = 0; sid < pre.num_subdomains(); ++sid) {
      const SubdomainOperator& op = pre.subdomain(sid);
      const LocalLayout& l = op.layout();
      Vector a(op.size());
      for (int v = 0; v < 5; ++v) {
        const Vector u = random_vector(op.size(), rng);
        op.apply(u, a);
        auto step = [&](int s) { return Vector(u.begin() + l.index(s, 0), u.begin() + l.index(s, 0) + l.nodes); };
        double expected = 0.0;
        Vector prev(l.nodes, 0.0);
        if (!l.first_in_time) prev = step(0);
        for (int s = 1; s <= l.last_step; ++s) {
          const Vector cur = step(s), d = subtract(cur, prev);
          expected += 0.5 * dot(d, op.block(s).mass * d) + local_disc.dt() * dot(cur, op.block(s).stiffness * cur);
          prev = cur;
        }
        if (l.last_in_time) expected += 0.5 * dot(prev, op.block(l.last_step).mass * prev);
        worst = std::max(worst, std::abs(dot(u, a) - expected) / std::abs(expected));
      }
    }
    r.passed = worst <= 1e-10;
    r.detail = "max relative defect " + fmt(worst) + " (global and per subdomain)";
  });
}

PropertyResult check_single_subdomain(unsigned /*seed*/) {
  return timed("single_subdomain_exactness", [&](PropertyResult& r) {
    Discretization disc(SpaceTimeMesh(1.0, 1.0, 10, 10, 0.5, 8), oracle_physics());
    SpaceTimePartition part(disc.mesh(), 1, 1, 1);
    SolverConfig cfg;
    cfg.gmres.relative_tolerance = 1e-10;
    cfg.stbddc.threads = 1;
    SolveReport rep;
    const Vector u = solve_spacetime(disc, part, disc.rhs(), cfg, rep);
    const double diff = relative_difference(u, solve_monolithic_direct(disc, disc.rhs()));
    r.passed = rep.converged && rep.linear_iterations == 1 && diff <= 1e-10;
    r.detail = std::to_string(rep.linear_iterations) + " GMRES iteration(s), difference to LU " + fmt(diff);
  });
}

PropertyResult check_oracle_equivalence(unsigned /*seed*/) {
  return timed("oracle_equivalence", [&](PropertyResult& r) {
    Discretization disc(SpaceTimeMesh(1.0, 1.0, 30, 30, 1.0, 20), oracle_physics());
    SpaceTimePartition part(disc.mesh(), 3, 3, 2);
    const Vector b = disc.rhs();
    SolverConfig cfg;
    cfg.gmres.relative_tolerance = 1e-10;
    SolveReport rep;
    const Vector u = solve_spacetime(disc, part, b, cfg, rep);
    const double diff = relative_difference(u, solve_monolithic_direct(disc, b));
    r.passed = rep.converged && diff <= 1e-6;
    r.detail = std::to_string(rep.linear_iterations) + " iterations, relative difference to LU " + fmt(diff);
  });
}

PropertyResult check_coarse_basis(unsigned /*seed*/) {
  return timed("coarse_basis_identities", [&](PropertyResult& r) {
    Discretization disc(SpaceTimeMesh(1.0, 1.0, 30, 30, 1.0, 20), oracle_physics());
    SpaceTimePartition part(disc.mesh(), 3, 3, 2);
    StbddcPreconditioner pre(disc, part);
    double e_phi = 0.0, e_psi = 0.0, e_lam = 0.0;
    for (int sid = 0; sid < pre.num_subdomains(); ++sid) {
      const SparseMatrix& c = pre.constraints(sid).c;
      const SubdomainOperator& op = pre.subdomain(sid);
      const DenseMatrix phi = pre.phi(sid), psi = pre.psi(sid), lam = pre.lambda_phi(sid);
      const int m = c.rows();
      DenseMatrix aphi(op.size(), m);
      Vector col(op.size());
      for (int j = 0; j < m; ++j) {
        const Vector pj = phi.column(j), sj = psi.column(j);
        const Vector cp = c * pj, cs = c * sj;
        for (int i = 0; i < m; ++i) {
          const double id = i == j ? 1.0 : 0.0;
          e_phi = std::max(e_phi, std::abs(cp[i] - id));
          e_psi = std::max(e_psi, std::abs(cs[i] - id));
        }
        op.apply(pj, col);
        aphi.set_column(j, col);
      }
      double scale = std::max(1.0, lam.max_abs());
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          double s = 0.0;
          for (int a = 0; a < op.size(); ++a) s += psi(a, i) * aphi(a, j);
          e_lam = std::max(e_lam, std::abs(s + lam(i, j)) / scale);
        }
    }
    r.passed = e_phi <= 1e-10 && e_psi <= 1e-10 && e_lam <= 1e-10;
    r.detail = std::to_string(pre.num_subdomains()) + " subdomains, |C Phi - I| " + fmt(e_phi) + ", |C Psi - I| " +
               fmt(e_psi) + ", |Psi^T A Phi + Lambda| " + fmt(e_lam);
  });
}

std::vector<PropertyResult> verify_suite(unsigned seed, const VerifyHooks& hooks) {
  return {check_assembly_equivalence(seed, hooks), check_energy_identity(seed), check_positivity(seed),
          check_coarse_basis(seed),  check_oracle_equivalence(seed),       check_single_subdomain(seed)};
}

}  // namespace stbddc
