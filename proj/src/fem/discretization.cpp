#include "stbddc/fem/discretization.hpp"

#include <algorithm>

namespace stbddc {

SpatialOperators assemble_spatial_operators(const SpaceTimeMesh& mesh, const PhysicsConfig& physics,
                                            std::span<const double> cell_viscosity) {
  require(cell_viscosity.empty() || static_cast<int>(cell_viscosity.size()) == mesh.num_cells(),
          ErrorCode::kDimensionMismatch, "assemble_spatial_operators: viscosity size");
  SpatialOperators ops;
  const double h = mesh.h();
  const double dt = mesh.dt();
  if (cell_viscosity.empty()) {
    ops.elements.push_back(element_matrices(h, physics.nu, physics.beta_x, physics.beta_y, physics.sigma, dt,
                                            physics.supg, physics.tau_formula));
  } else {
    ops.elements.reserve(cell_viscosity.size());
    for (double nu : cell_viscosity) {
      ops.elements.push_back(element_matrices(h, nu, physics.beta_x, physics.beta_y, physics.sigma, dt,
                                              physics.supg, physics.tau_formula));
    }
  }
  const int n_int = mesh.num_interior();
  std::vector<Triplet> m_ii, k_ii, m_ib, k_ib;
  m_ii.reserve(16 * static_cast<std::size_t>(mesh.num_cells()));
  k_ii.reserve(16 * static_cast<std::size_t>(mesh.num_cells()));
  for (int cj = 0; cj < mesh.ny(); ++cj) {
    for (int ci = 0; ci < mesh.nx(); ++ci) {
      const ElementMatrices& e = ops.element(mesh.cell(ci, cj));
      const int ii[4] = {ci, ci + 1, ci + 1, ci};
      const int jj[4] = {cj, cj, cj + 1, cj + 1};
      for (int a = 0; a < 4; ++a) {
        const int row = mesh.interior_index(ii[a], jj[a]);
        if (row < 0) continue;
        for (int b = 0; b < 4; ++b) {
          const int col = mesh.interior_index(ii[b], jj[b]);
          if (col >= 0) {
            m_ii.push_back({row, col, e.m(a, b)});
            k_ii.push_back({row, col, e.k(a, b)});
          } else {
            const int node = mesh.node(ii[b], jj[b]);
            m_ib.push_back({row, node, e.m(a, b)});
            k_ib.push_back({row, node, e.k(a, b)});
          }
        }
      }
    }
  }
  ops.mass = SparseMatrix::from_triplets(n_int, n_int, std::move(m_ii));
  ops.stiffness = SparseMatrix::from_triplets(n_int, n_int, std::move(k_ii));
  ops.mass_boundary = SparseMatrix::from_triplets(n_int, mesh.num_nodes(), std::move(m_ib));
  ops.stiffness_boundary = SparseMatrix::from_triplets(n_int, mesh.num_nodes(), std::move(k_ib));
  return ops;
}

Discretization::Discretization(SpaceTimeMesh mesh, PhysicsConfig physics)
    : mesh_(std::move(mesh)), physics_(std::move(physics)) {
  physics_.validate();
  auto ops = std::make_shared<const SpatialOperators>(assemble_spatial_operators(mesh_, physics_));
  ops_.assign(mesh_.num_steps(), ops);
}

Discretization::Discretization(SpaceTimeMesh mesh, PhysicsConfig physics, const std::vector<Vector>& viscosity)
    : mesh_(std::move(mesh)), physics_(std::move(physics)) {
  physics_.validate();
  require(static_cast<int>(viscosity.size()) == mesh_.num_steps(), ErrorCode::kDimensionMismatch,
          "Discretization: one viscosity field per step expected");
  ops_.reserve(viscosity.size());
  for (const Vector& nu : viscosity) {
    ops_.push_back(std::make_shared<const SpatialOperators>(assemble_spatial_operators(mesh_, physics_, nu)));
  }
}

void Discretization::apply(std::span<const double> u, std::span<double> out) const {
  require(u.size() == size() && out.size() == size(), ErrorCode::kDimensionMismatch, "Discretization::apply");
  const std::size_t n = num_interior();
  const double dt = mesh_.dt();
  for (int k = 1; k <= num_steps(); ++k) {
    const auto uk = u.subspan((k - 1) * n, n);
    auto ok = out.subspan((k - 1) * n, n);
    const SpatialOperators& op = step_operators(k);
    op.mass.multiply(uk, ok);
    op.stiffness.multiply_add(dt, uk, ok);
    if (k > 1) op.mass.multiply_add(-1.0, u.subspan((k - 2) * n, n), ok);
  }
}

void Discretization::apply_transpose(std::span<const double> u, std::span<double> out) const {
  require(u.size() == size() && out.size() == size(), ErrorCode::kDimensionMismatch,
          "Discretization::apply_transpose");
  const std::size_t n = num_interior();
  const double dt = mesh_.dt();
  std::fill(out.begin(), out.end(), 0.0);
  for (int k = 1; k <= num_steps(); ++k) {
    const auto uk = u.subspan((k - 1) * n, n);
    auto ok = out.subspan((k - 1) * n, n);
    const SpatialOperators& op = step_operators(k);
    op.mass.multiply_transpose_add(1.0, uk, ok);
    op.stiffness.multiply_transpose_add(dt, uk, ok);
    if (k > 1) op.mass.multiply_transpose_add(-1.0, uk, out.subspan((k - 2) * n, n));
  }
}

SparseMatrix Discretization::assemble_spacetime() const {
  const int n = num_interior();
  const double dt = mesh_.dt();
  std::vector<Triplet> t;
  for (int k = 1; k <= num_steps(); ++k) {
    const SpatialOperators& op = step_operators(k);
    const int r0 = (k - 1) * n;
    auto add = [&](const SparseMatrix& a, double s, int c0) {
      const auto rp = a.row_ptr();
      const auto ci = a.col_idx();
      const auto v = a.values();
      for (int i = 0; i < n; ++i)
        for (int p = rp[i]; p < rp[i + 1]; ++p) t.push_back({r0 + i, c0 + ci[p], s * v[p]});
    };
    add(op.mass, 1.0, r0);
    add(op.stiffness, dt, r0);
    if (k > 1) add(op.mass, -1.0, r0 - n);
  }
  const int total = static_cast<int>(size());
  return SparseMatrix::from_triplets(total, total, std::move(t));
}

Vector Discretization::load(int step) const {
  const SpatialOperators& op = step_operators(step);
  Vector f(num_interior(), 0.0);
  const double h = mesh_.h();
  const double t = time(step);
  const double dt = mesh_.dt();
  for (int cj = 0; cj < mesh_.ny(); ++cj) {
    for (int ci = 0; ci < mesh_.nx(); ++ci) {
      const double tau = op.element(mesh_.cell(ci, cj)).tau;
      const auto fe = element_load(h, mesh_.x(ci), mesh_.y(cj), t, physics_.forcing, tau, physics_.beta_x,
                                   physics_.beta_y);
      const int ii[4] = {ci, ci + 1, ci + 1, ci};
      const int jj[4] = {cj, cj, cj + 1, cj + 1};
      for (int a = 0; a < 4; ++a) {
        const int row = mesh_.interior_index(ii[a], jj[a]);
        if (row >= 0) f[row] += dt * fe[a];
      }
    }
  }
  return f;
}

Vector Discretization::boundary_values(int step) const {
  Vector g(mesh_.num_nodes(), 0.0);
  const double t = time(step);
  const bool initial = step == 0 && first_step_ == 1;
  const ScalarField& field = initial ? physics_.initial : physics_.dirichlet;
  for (int j = 0; j <= mesh_.ny(); ++j)
    for (int i = 0; i <= mesh_.nx(); ++i)
      if (mesh_.on_boundary(i, j)) g[mesh_.node(i, j)] = field(mesh_.x(i), mesh_.y(j), t);
  return g;
}

Vector Discretization::initial_interior() const {
  Vector u(num_interior());
  const double t = time(0);
  const ScalarField& field = first_step_ == 1 ? physics_.initial : physics_.dirichlet;
  for (int j = 1; j < mesh_.ny(); ++j)
    for (int i = 1; i < mesh_.nx(); ++i) u[mesh_.interior_index(i, j)] = field(mesh_.x(i), mesh_.y(j), t);
  return u;
}

Vector Discretization::rhs(std::span<const double> initial_interior_values) const {
  const std::size_t n = num_interior();
  const double dt = mesh_.dt();
  Vector u0 = initial_interior_values.empty()
                  ? initial_interior()
                  : Vector(initial_interior_values.begin(), initial_interior_values.end());
  require(u0.size() == n, ErrorCode::kDimensionMismatch, "Discretization::rhs: initial state size");
  Vector b(size(), 0.0);
  Vector g_prev = boundary_values(0);
  for (int k = 1; k <= num_steps(); ++k) {
    const SpatialOperators& op = step_operators(k);
    Vector bk = load(k);
    Vector g = boundary_values(k);
    Vector dg(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) dg[i] = g[i] - g_prev[i];
    op.mass_boundary.multiply_add(-1.0, dg, bk);
    op.stiffness_boundary.multiply_add(-dt, g, bk);
    if (k == 1) op.mass.multiply_add(1.0, u0, bk);
    std::copy(bk.begin(), bk.end(), b.begin() + (k - 1) * n);
    g_prev = std::move(g);
  }
  return b;
}

Vector Discretization::nodal_field(int step, std::span<const double> interior_values) const {
  require(interior_values.size() == static_cast<std::size_t>(num_interior()), ErrorCode::kDimensionMismatch,
          "nodal_field: interior size");
  Vector u = boundary_values(step);
  for (int j = 1; j < mesh_.ny(); ++j)
    for (int i = 1; i < mesh_.nx(); ++i) u[mesh_.node(i, j)] = interior_values[mesh_.interior_index(i, j)];
  return u;
}

Discretization Discretization::window(int first, int count) const {
  require(first >= 1 && count >= 1 && first + count - 1 <= num_steps(), ErrorCode::kInvalidArgument,
          "Discretization::window: range outside the time grid");
  Discretization w;
  w.mesh_ = SpaceTimeMesh(mesh_.length_x(), mesh_.length_y(), mesh_.nx(), mesh_.ny(), count * mesh_.dt(), count);
  w.physics_ = physics_;
  w.first_step_ = first_step_ + first - 1;
  w.ops_.assign(ops_.begin() + (first - 1), ops_.begin() + (first - 1 + count));
  return w;
}

Discretization Discretization::single_step(const SpaceTimeMesh& mesh, const PhysicsConfig& physics, int step,
                                           std::span<const double> cell_viscosity) {
  require(step >= 1 && step <= mesh.num_steps(), ErrorCode::kInvalidArgument, "single_step: step out of range");
  physics.validate();
  Discretization d;
  d.mesh_ = SpaceTimeMesh(mesh.length_x(), mesh.length_y(), mesh.nx(), mesh.ny(), mesh.dt(), 1);
  d.physics_ = physics;
  d.first_step_ = step;
  d.ops_.push_back(std::make_shared<const SpatialOperators>(assemble_spatial_operators(d.mesh_, physics, cell_viscosity)));
  return d;
}

}  // namespace stbddc
