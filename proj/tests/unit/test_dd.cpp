#include <gtest/gtest.h>

#include <random>

#include "stbddc/core/dense_matrix.hpp"
#include "stbddc/dd/preconditioner.hpp"

using namespace stbddc;

namespace {

Vector random_vector(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector v(n);
  for (double& x : v) x = u(rng);
  return v;
}

PhysicsConfig cdr_physics(bool supg) {
  PhysicsConfig p;
  p.nu = 0.05;
  p.beta_x = 1.0;
  p.beta_y = 0.4;
  p.sigma = 0.1;
  p.supg = supg;
  return p;
}

struct Problem {
  Discretization disc;
  SpaceTimePartition part;
  Problem(int n, int k, int px, int py, int pt, PhysicsConfig phys)
      : disc(SpaceTimeMesh(1.0, 1.0, n, n, 0.5, k), std::move(phys)), part(disc.mesh(), px, py, pt) {}
};

DenseMatrix dense_of(const SparseMatrix& a) { return a.to_dense(); }

// Bidiagonal local operator written out from its spatial blocks.
DenseMatrix local_oracle(const SubdomainOperator& op, double dt) {
  const LocalLayout& l = op.layout();
  const int n = l.nodes;
  DenseMatrix a(l.size(), l.size());
  for (int s = l.first_step; s <= l.last_step; ++s) {
    const DenseMatrix m = dense_of(op.block(s).mass), k = dense_of(op.block(s).stiffness);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double d = m(i, j) + dt * k(i, j);
        if (s == 0) d = 0.5 * m(i, j);
        if (s == l.last_step && !l.last_in_time) d -= 0.5 * m(i, j);
        a(l.index(s, i), l.index(s, j)) = d;
        if (s > l.first_step) a(l.index(s, i), l.index(s - 1, j)) = -m(i, j);
      }
    }
  }
  return a;
}

double quad(const DenseMatrix& a, std::span<const double> u) {
  Vector au(a.rows());
  a.multiply(u, au);
  return dot(u, au);
}

}  // namespace

TEST(LocalSpatial, SubassembledMatricesSumToGlobal) {
  Problem pb(6, 2, 3, 2, 1, cdr_physics(true));
  const auto& mesh = pb.disc.mesh();
  const int n = mesh.num_interior();
  DenseMatrix m(n, n), k(n, n);
  for (int w = 0; w < pb.part.num_spatial(); ++w) {
    const auto& sub = pb.part.spatial(w);
    SparseMatrix lm, lk;
    assemble_local_spatial(mesh, sub, pb.part.cells_x(), pb.part.cells_y(), pb.disc.step_operators(1), lm, lk);
    const DenseMatrix dm = lm.to_dense(), dk = lk.to_dense();
    for (int a = 0; a < sub.num_local(); ++a)
      for (int b = 0; b < sub.num_local(); ++b) {
        m(sub.dofs[a], sub.dofs[b]) += dm(a, b);
        k(sub.dofs[a], sub.dofs[b]) += dk(a, b);
      }
  }
  EXPECT_LE((m - pb.disc.mass(1).to_dense()).max_abs(), 1e-15);
  EXPECT_LE((k - pb.disc.stiffness(1).to_dense()).max_abs(), 1e-14);
}

TEST(SubdomainOperator, MatchesBidiagonalOracleAndInverts) {
  Problem pb(4, 6, 2, 1, 3, cdr_physics(true));
  StbddcPreconditioner pre(pb.disc, pb.part);
  for (int sid = 0; sid < pre.num_subdomains(); ++sid) {
    const SubdomainOperator& op = pre.subdomain(sid);
    const DenseMatrix ref = local_oracle(op, pb.disc.dt());
    EXPECT_LE((op.to_dense() - ref).max_abs(), 1e-15) << "subdomain " << sid;

    const Vector b = random_vector(op.size(), 10 + sid);
    Vector x(op.size()), y(op.size());
    op.solve(b, x);
    op.apply(x, y);
    EXPECT_LE(relative_difference(y, b), 1e-12);
    op.solve_transpose(b, x);
    ref.multiply_transpose(x, y);
    EXPECT_LE(relative_difference(y, b), 1e-12);
    // in-place
    Vector z(b);
    op.solve(z, z);
    op.solve(b, x);
    EXPECT_EQ(z, x);
  }
}

TEST(SubdomainOperator, TwoByTwoBlockByHand) {
  // one interior node, K = 2, two slabs of one step: second slab holds
  // [m/2, 0; -m, m + dt k]
  Problem pb(2, 2, 1, 1, 2, PhysicsConfig{});
  StbddcPreconditioner pre(pb.disc, pb.part);
  const double h = 0.5, dt = 0.25;
  const double m = 4.0 * h * h / 9.0, k = 8.0 / 3.0;
  const DenseMatrix first = pre.subdomain(0).to_dense();
  ASSERT_EQ(first.rows(), 1);
  EXPECT_NEAR(first(0, 0), m + dt * k - 0.5 * m, 1e-15);
  const DenseMatrix second = pre.subdomain(1).to_dense();
  ASSERT_EQ(second.rows(), 2);
  EXPECT_NEAR(second(0, 0), 0.5 * m, 1e-15);
  EXPECT_NEAR(second(0, 1), 0.0, 0.0);
  EXPECT_NEAR(second(1, 0), -m, 1e-15);
  EXPECT_NEAR(second(1, 1), m + dt * k, 1e-15);
}

TEST(SubdomainOperator, EnergyIdentityAndPositivity) {
  // no SUPG: the mass matrix is symmetric and the identity is exact
  Problem pb(6, 6, 3, 2, 3, cdr_physics(false));
  StbddcPreconditioner pre(pb.disc, pb.part);
  const double dt = pb.disc.dt();
  for (int sid = 0; sid < pre.num_subdomains(); ++sid) {
    const SubdomainOperator& op = pre.subdomain(sid);
    const LocalLayout& l = op.layout();
    const DenseMatrix a = op.to_dense();
    for (unsigned seed = 0; seed < 5; ++seed) {
      const Vector u = random_vector(l.size(), 100 * sid + seed);
      auto step = [&](int s) { return std::span<const double>(u).subspan(l.index(s, 0), l.nodes); };
      double expected = 0.0;
      Vector prev(l.nodes, 0.0);
      if (!l.first_in_time) prev.assign(step(0).begin(), step(0).end());
      for (int s = 1; s <= l.last_step; ++s) {
        const auto& blk = op.block(s);
        const Vector d = subtract(step(s), prev);
        expected += 0.5 * dot(d, blk.mass * d) + dt * dot(step(s), blk.stiffness * Vector(step(s).begin(), step(s).end()));
        prev.assign(step(s).begin(), step(s).end());
      }
      if (l.last_in_time) expected += 0.5 * dot(prev, op.block(l.last_step).mass * prev);
      const double got = quad(a, u);
      EXPECT_NEAR(got, expected, 1e-12 * std::abs(expected));
      EXPECT_GT(got, 0.0);
    }
  }
}

TEST(SubdomainOperator, FlippedPerturbationBreaksAssembly) {
  for (int which = 0; which < 3; ++which) {
    Problem pb(4, 4, 2, 2, 2, cdr_physics(true));
    StbddcOptions opt;
    if (which == 1) opt.signs.initial = -1.0;
    if (which == 2) opt.signs.final = -1.0;
    StbddcPreconditioner pre(pb.disc, pb.part, opt);
    const Vector u = random_vector(pb.disc.size(), 7);
    std::vector<Vector> local(pre.num_subdomains());
    for (int sid = 0; sid < pre.num_subdomains(); ++sid) {
      Vector ul(pre.subdomain(sid).size());
      pre.restrict_to(sid, u, ul);
      local[sid].resize(ul.size());
      pre.subdomain(sid).apply(ul, local[sid]);
    }
    Vector assembled(u.size()), ref(u.size());
    pre.assemble(local, assembled);
    pb.disc.apply(u, ref);
    const double err = relative_difference(assembled, ref);
    if (which == 0) {
      EXPECT_LE(err, 1e-13);
    } else {
      EXPECT_GT(err, 1e-3);
    }
  }
}

namespace {

// Everything the explicit preconditioner needs, built from the global matrix
// and index arithmetic rather than from the preconditioner's own routines.
struct DenseBddc {
  const Problem& pb;
  const StbddcPreconditioner& pre;
  DenseMatrix a;
  std::vector<int> v0;  // global indices of the bubble space
  DenseLU a0;

  DenseBddc(const Problem& p, const StbddcPreconditioner& pc) : pb(p), pre(pc), a(p.disc.assemble_spacetime().to_dense()) {
    const int n = pb.disc.num_interior(), kn = pb.part.steps_per_slab(), steps = pb.disc.num_steps();
    for (int g = 1; g <= steps; ++g)
      for (int d = 0; d < n; ++d)
        if (pb.part.multiplicity(d) == 1 && (g % kn != 0 || g == steps)) v0.push_back((g - 1) * n + d);
    DenseMatrix a00(static_cast<int>(v0.size()), static_cast<int>(v0.size()));
    for (std::size_t i = 0; i < v0.size(); ++i)
      for (std::size_t j = 0; j < v0.size(); ++j) a00(i, j) = a(v0[i], v0[j]);
    a0 = DenseLU(a00);
  }

  Vector interior(std::span<const double> r) const {
    Vector b(v0.size());
    for (std::size_t i = 0; i < v0.size(); ++i) b[i] = r[v0[i]];
    const Vector x = a0.solve(b);
    Vector out(r.size(), 0.0);
    for (std::size_t i = 0; i < v0.size(); ++i) out[v0[i]] = x[i];
    return out;
  }

  Vector times_a(std::span<const double> v) const {
    Vector out(v.size());
    a.multiply(v, out);
    return out;
  }

  long long gidx(const LocalLayout& l, int s, int node) const {
    const int g = l.layer * pb.part.steps_per_slab() + s;
    return static_cast<long long>(g - 1) * pb.disc.num_interior() + pb.part.spatial(l.omega).dofs[node];
  }

  // E W A~^-1 W^T r with A~^-1 from one saddle-point system on the whole
  // product space: local unknowns, local multipliers, global coarse values.
  Vector apply(std::span<const double> r) const {
    const int nsub = pre.num_subdomains();
    std::vector<int> off(nsub + 1, 0), coff(nsub + 1, 0);
    for (int s = 0; s < nsub; ++s) {
      off[s + 1] = off[s] + pre.subdomain(s).size();
      coff[s + 1] = coff[s] + pre.constraints(s).rows();
    }
    const int nu = off[nsub], nc = coff[nsub], ng = pre.coarse_space().num_global;
    DenseMatrix k(nu + nc + ng, nu + nc + ng);
    Vector rhs(nu + nc + ng, 0.0);
    for (int s = 0; s < nsub; ++s) {
      const DenseMatrix as = pre.subdomain(s).to_dense();
      const DenseMatrix cs = pre.constraints(s).c.to_dense();
      const LocalLayout& l = pre.subdomain(s).layout();
      for (int i = 0; i < as.rows(); ++i)
        for (int j = 0; j < as.cols(); ++j) k(off[s] + i, off[s] + j) = as(i, j);
      for (int q = 0; q < cs.rows(); ++q) {
        for (int j = 0; j < cs.cols(); ++j) {
          k(off[s] + j, nu + coff[s] + q) = cs(q, j);
          k(nu + coff[s] + q, off[s] + j) = cs(q, j);
        }
        const int g = pre.constraints(s).global_ids[q];
        k(nu + coff[s] + q, nu + nc + g) = -1.0;
        k(nu + nc + g, nu + coff[s] + q) = 1.0;
      }
      for (int st = std::max(1, l.first_step); st <= l.last_step; ++st)
        for (int a = 0; a < l.nodes; ++a)
          rhs[off[s] + l.index(st, a)] = r[gidx(l, st, a)] / pb.part.multiplicity(pb.part.spatial(l.omega).dofs[a]);
    }
    const Vector sol = DenseLU(k).solve(rhs);
    Vector w(r.size(), 0.0);
    for (int s = 0; s < nsub; ++s) {
      const LocalLayout& l = pre.subdomain(s).layout();
      for (int st = std::max(1, l.first_step); st <= l.last_step; ++st)
        for (int a = 0; a < l.nodes; ++a)
          w[gidx(l, st, a)] +=
              sol[off[s] + l.index(st, a)] / pb.part.multiplicity(pb.part.spatial(l.omega).dofs[a]);
    }
    const Vector c = interior(times_a(w));
    return subtract(w, c);
  }
};

void check_against_dense(const Problem& pb, CoarseVariant variant) {
  StbddcOptions opt;
  opt.variant = variant;
  StbddcPreconditioner pre(pb.disc, pb.part, opt);
  DenseBddc ref(pb, pre);
  ASSERT_EQ(ref.v0.size() + pre.interface_dofs(), pb.disc.size());

  const Vector b = random_vector(pb.disc.size(), 3);
  // oracle interior correction
  const Vector c = ref.interior(b);
  EXPECT_LE(relative_difference(pre.interior_correction(b), c), 1e-12);

  // simplified form on a residual orthogonal to V0
  const Vector r = subtract(b, ref.times_a(c));
  Vector z(r.size());
  pre.apply(r, z);
  EXPECT_LE(relative_difference(z, ref.apply(r)), 1e-10);

  // full form on an arbitrary residual
  pre.apply_full(b, z);
  Vector zf = ref.apply(r);
  axpy(1.0, c, zf);
  EXPECT_LE(relative_difference(z, zf), 1e-10);
}

}  // namespace

TEST(Preconditioner, MatchesDenseOracleSpaceTime) {
  check_against_dense(Problem(4, 4, 2, 1, 2, cdr_physics(true)), CoarseVariant::kCornersEdges);
  check_against_dense(Problem(4, 6, 2, 2, 3, cdr_physics(true)), CoarseVariant::kCornersEdges);
  check_against_dense(Problem(4, 6, 2, 2, 3, cdr_physics(false)), CoarseVariant::kCorners);
}

TEST(Preconditioner, MatchesDenseOracleTimeOnly) {
  check_against_dense(Problem(4, 8, 1, 1, 4, PhysicsConfig{}), CoarseVariant::kCornersEdges);
}

TEST(Preconditioner, HarmonicExtensionIsAProjection) {
  Problem pb(6, 6, 3, 2, 2, cdr_physics(true));
  StbddcPreconditioner pre(pb.disc, pb.part);
  const Vector v = random_vector(pb.disc.size(), 5);
  Vector ev(v.size()), eev(v.size()), aev(v.size());
  pre.harmonic_extension(v, ev);
  pre.harmonic_extension(ev, eev);
  EXPECT_LE(relative_difference(eev, ev), 1e-12);
  // A E v has no component on V0
  pb.disc.apply(ev, aev);
  EXPECT_LE(norm2(pre.interior_correction(aev)), 1e-12 * norm2(v));
}

TEST(Preconditioner, WeightingPartitionsUnity) {
  Problem pb(6, 6, 3, 2, 3, PhysicsConfig{});
  StbddcPreconditioner pre(pb.disc, pb.part);
  const Vector u = random_vector(pb.disc.size(), 9);
  std::vector<Vector> local(pre.num_subdomains());
  for (int sid = 0; sid < pre.num_subdomains(); ++sid) {
    local[sid].resize(pre.subdomain(sid).size());
    pre.restrict_to(sid, u, local[sid]);
  }
  Vector wr(u.size());
  pre.weight(local, wr);
  EXPECT_LE(relative_difference(wr, u), 1e-15);
  // W^T is the adjoint of W
  const Vector r = random_vector(u.size(), 10);
  std::vector<Vector> wtr;
  pre.weight_transpose(r, wtr);
  double lhs = 0.0;
  for (int sid = 0; sid < pre.num_subdomains(); ++sid) lhs += dot(wtr[sid], local[sid]);
  EXPECT_NEAR(lhs, dot(r, wr), 1e-12);
}

TEST(Preconditioner, CoarseBasisIdentities) {
  Problem pb(6, 6, 3, 2, 2, cdr_physics(true));
  StbddcPreconditioner pre(pb.disc, pb.part);
  for (int sid = 0; sid < pre.num_subdomains(); ++sid) {
    const DenseMatrix c = pre.constraints(sid).c.to_dense();
    const DenseMatrix a = pre.subdomain(sid).to_dense();
    const DenseMatrix phi = pre.phi(sid), psi = pre.psi(sid);
    const int m = c.rows();
    const DenseMatrix eye = DenseMatrix::identity(m);
    EXPECT_LE((c * phi - eye).max_abs(), 1e-10);
    EXPECT_LE((c * psi - eye).max_abs(), 1e-10);
    // Phi is A-orthogonal to the fine space from the left: A Phi in range(C^T)
    const DenseMatrix lam = pre.lambda_phi(sid);
    DenseMatrix neg = lam;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) neg(i, j) = -lam(i, j);
    const DenseMatrix residual = a * phi - c.transpose() * neg;
    EXPECT_LE(residual.max_abs(), 1e-10 * std::max(1.0, a.max_abs()));
    EXPECT_LE((psi.transpose() * a * phi - neg).max_abs(), 1e-10 * std::max(1.0, neg.max_abs()));
  }
}

TEST(Preconditioner, FinePartSatisfiesConstraints) {
  Problem pb(6, 6, 3, 2, 2, cdr_physics(true));
  StbddcPreconditioner pre(pb.disc, pb.part);
  std::vector<Vector> s(pre.num_subdomains()), u, fine;
  for (int sid = 0; sid < pre.num_subdomains(); ++sid) s[sid] = random_vector(pre.subdomain(sid).size(), sid);
  pre.constrained_solve(s, u, &fine);
  for (int sid = 0; sid < pre.num_subdomains(); ++sid) {
    const Vector cf = pre.constraints(sid).c * fine[sid];
    EXPECT_LE(max_abs(cf), 1e-12 * (1.0 + max_abs(s[sid])));
  }
  // the coarse values of u agree across subdomains
  std::vector<std::vector<double>> vals(pre.coarse_space().num_global);
  for (int sid = 0; sid < pre.num_subdomains(); ++sid) {
    const Vector cu = pre.constraints(sid).c * u[sid];
    for (int q = 0; q < pre.constraints(sid).rows(); ++q) vals[pre.constraints(sid).global_ids[q]].push_back(cu[q]);
  }
  for (const auto& v : vals)
    for (double x : v) EXPECT_NEAR(x, v.front(), 1e-10 * (1.0 + std::abs(v.front())));
}

TEST(Preconditioner, SingleSubdomainFullFormIsExact) {
  Problem pb(5, 4, 1, 1, 1, cdr_physics(true));
  StbddcPreconditioner pre(pb.disc, pb.part);
  EXPECT_TRUE(pre.bubble_space_is_everything());
  const Vector r = random_vector(pb.disc.size(), 2);
  Vector z(r.size()), az(r.size());
  pre.apply_full(r, z);
  pb.disc.apply(z, az);
  EXPECT_LE(relative_difference(az, r), 1e-12);
}

TEST(Preconditioner, ThreadCountDoesNotChangeResult) {
  Problem pb(6, 4, 3, 2, 2, cdr_physics(true));
  StbddcOptions one, three;
  one.threads = 1;
  three.threads = 3;
  StbddcPreconditioner p1(pb.disc, pb.part, one), p3(pb.disc, pb.part, three);
  const Vector r = random_vector(pb.disc.size(), 4);
  Vector z1(r.size()), z3(r.size());
  p1.apply_full(r, z1);
  p3.apply_full(r, z3);
  EXPECT_EQ(z1, z3);
}
