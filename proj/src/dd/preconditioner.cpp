#include "stbddc/dd/preconditioner.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <string>

namespace stbddc {

namespace {

struct BlockNeeds {
  bool full = false, last = false, half = false;
};

std::shared_ptr<LocalSpatialBlock> build_block(const SpaceTimeMesh& mesh, const SpaceTimePartition& part,
                                               const SpatialSubdomain& sub, const std::vector<int>& interior_nodes,
                                               const SpatialOperators& ops, double dt, BlockNeeds needs,
                                               PerturbationSigns signs) {
  auto b = std::make_shared<LocalSpatialBlock>();
  assemble_local_spatial(mesh, sub, part.cells_x(), part.cells_y(), ops, b->mass, b->stiffness);
  const SparseMatrix full = linear_combination(1.0, b->mass, dt, b->stiffness);
  try {
    if (needs.full) {
      b->full.emplace(full);
      const SparseMatrix full_ii = full.submatrix(interior_nodes, interior_nodes);
      if (full_ii.rows() > 0) b->interior.emplace(full_ii);
      b->mass_interior = b->mass.submatrix(interior_nodes, interior_nodes);
    }
    if (needs.last) b->last.emplace(linear_combination(1.0, full, -0.5 * signs.final, b->mass));
    if (needs.half) b->half.emplace(b->mass.scaled(0.5 * signs.initial));
  } catch (const Error& e) {
    throw Error(ErrorCode::kSingularBlock,
                "spatial subdomain " + std::to_string(sub.index) + ": singular time-step block (" + e.what() + ")");
  }
  return b;
}

}  // namespace

StbddcPreconditioner::StbddcPreconditioner(const Discretization& disc, const SpaceTimePartition& partition,
                                           StbddcOptions options)
    : disc_(&disc), part_(&partition), options_(options) {
  const auto t0 = std::chrono::steady_clock::now();
  const SpaceTimeMesh& mesh = partition.mesh();
  require(mesh.nx() == disc.mesh().nx() && mesh.ny() == disc.mesh().ny() && mesh.num_steps() == disc.num_steps(),
          ErrorCode::kDimensionMismatch, "preconditioner: partition and discretization grids differ");
  const int kn = partition.steps_per_slab();
  const int num_steps = disc.num_steps();
  const double dt = disc.dt();
  const int threads = options_.threads;

  coarse_ = build_constraints(partition, options_.variant, options_.mode);

  // spatial blocks, one per (spatial subdomain, distinct step operator set)
  std::map<const SpatialOperators*, int> op_index;
  std::vector<const SpatialOperators*> unique_ops;
  std::vector<int> step_to_op(num_steps + 1, 0);
  for (int g = 1; g <= num_steps; ++g) {
    const SpatialOperators* op = &disc.step_operators(g);
    auto [it, inserted] = op_index.emplace(op, static_cast<int>(unique_ops.size()));
    if (inserted) unique_ops.push_back(op);
    step_to_op[g] = it->second;
  }
  std::vector<BlockNeeds> needs(unique_ops.size());
  for (int g = 1; g <= num_steps; ++g) {
    BlockNeeds& nd = needs[step_to_op[g]];
    if (g % kn != 0 || g == num_steps) {
      nd.full = true;
    } else {
      nd.last = true;
      nd.half = true;
    }
  }
  const int n_omega = partition.num_spatial();
  std::vector<std::vector<int>> interior_nodes(n_omega);
  for (int w = 0; w < n_omega; ++w) {
    const SpatialSubdomain& sub = partition.spatial(w);
    for (int a = 0; a < sub.num_local(); ++a)
      if (partition.multiplicity(sub.dofs[a]) == 1) interior_nodes[w].push_back(a);
  }
  const int n_ops = static_cast<int>(unique_ops.size());
  std::vector<std::shared_ptr<const LocalSpatialBlock>> blocks(static_cast<std::size_t>(n_omega) * n_ops);
  parallel_for(
      n_omega * n_ops,
      [&](int idx) {
        const int w = idx / n_ops, o = idx % n_ops;
        blocks[idx] = build_block(mesh, partition, partition.spatial(w), interior_nodes[w], *unique_ops[o], dt,
                                  needs[o], options_.signs);
      },
      threads);

  const int nsub = partition.num_subdomains();
  subs_.resize(nsub);
  for (int layer = 0; layer < partition.pt(); ++layer) {
    for (int w = 0; w < n_omega; ++w) {
      const int sid = subdomain_id(partition, w, layer);
      const LocalLayout lay = local_layout(partition, w, layer);
      std::vector<std::shared_ptr<const LocalSpatialBlock>> bl;
      for (int s = lay.first_step; s <= lay.last_step; ++s)
        bl.push_back(blocks[static_cast<std::size_t>(w) * n_ops + step_to_op[layer * kn + s]]);
      subs_[sid].op = SubdomainOperator(lay, dt, std::move(bl), options_.signs);
      subs_[sid].interior_nodes = interior_nodes[w];
      subs_[sid].interior_steps = lay.last_in_time ? kn : kn - 1;
    }
  }

  // local Schur complements C A^-1 C^T, column by column
  parallel_for(
      nsub,
      [&](int sid) {
        SubdomainData& sd = subs_[sid];
        const SparseMatrix& c = coarse_.subdomains[sid].c;
        const int m = c.rows();
        sd.schur = DenseMatrix(m, m);
        if (m == 0) return;
        Vector e(m, 0.0), v(sd.op.size()), col(m);
        for (int j = 0; j < m; ++j) {
          std::fill(v.begin(), v.end(), 0.0);
          e[j] = 1.0;
          c.multiply_transpose_add(1.0, e, v);
          e[j] = 0.0;
          sd.op.solve(v, v);
          c.multiply(v, col);
          sd.schur.set_column(j, col);
        }
        try {
          sd.schur_lu = std::make_unique<DenseLU>(sd.schur);
        } catch (const Error& err) {
          throw Error(ErrorCode::kSingularSchur,
                      "subdomain " + std::to_string(sid) + ": singular constraint Schur complement (" + err.what() + ")");
        }
      },
      threads);

  // assembled coarse matrix: sum of the local coarse matrices schur^-1
  const int ng = coarse_.num_global;
  coarse_matrix_ = DenseMatrix(ng, ng);
  for (int sid = 0; sid < nsub; ++sid) {
    const SubdomainData& sd = subs_[sid];
    if (!sd.schur_lu) continue;
    const DenseMatrix local = sd.schur_lu->inverse();
    const auto& ids = coarse_.subdomains[sid].global_ids;
    for (int i = 0; i < local.rows(); ++i)
      for (int j = 0; j < local.cols(); ++j) coarse_matrix_(ids[i], ids[j]) += local(i, j);
  }
  if (ng > 0) {
    try {
      coarse_lu_ = std::make_unique<DenseLU>(coarse_matrix_);
    } catch (const Error& err) {
      throw Error(ErrorCode::kSingularCoarse, std::string("singular coarse matrix (") + err.what() + ")");
    }
  }

  const std::size_t n_int = disc.num_interior();
  std::size_t gamma = 0;
  for (std::size_t d = 0; d < n_int; ++d)
    if (partition.multiplicity(static_cast<int>(d)) > 1) ++gamma;
  interface_dofs_ = gamma * num_steps + (n_int - gamma) * static_cast<std::size_t>(partition.pt() - 1);

  setup_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

long long StbddcPreconditioner::global_index(const LocalLayout& l, int step, int node) const {
  const int g = l.global_step(step, part_->steps_per_slab());
  return static_cast<long long>(g - 1) * disc_->num_interior() + part_->spatial(l.omega).dofs[node];
}

void StbddcPreconditioner::restrict_to(int sid, std::span<const double> global, std::span<double> local) const {
  const LocalLayout& l = subs_[sid].op.layout();
  require(static_cast<int>(local.size()) == l.size() && global.size() == size(), ErrorCode::kDimensionMismatch,
          "restrict_to");
  for (int s = l.first_step; s <= l.last_step; ++s)
    for (int a = 0; a < l.nodes; ++a) local[l.index(s, a)] = global[global_index(l, s, a)];
}

void StbddcPreconditioner::assemble(const std::vector<Vector>& local, std::span<double> global) const {
  std::fill(global.begin(), global.end(), 0.0);
  for (int sid = 0; sid < num_subdomains(); ++sid) {
    const LocalLayout& l = subs_[sid].op.layout();
    for (int s = l.first_step; s <= l.last_step; ++s)
      for (int a = 0; a < l.nodes; ++a) global[global_index(l, s, a)] += local[sid][l.index(s, a)];
  }
}

void StbddcPreconditioner::weight(const std::vector<Vector>& local, std::span<double> global) const {
  std::fill(global.begin(), global.end(), 0.0);
  for (int sid = 0; sid < num_subdomains(); ++sid) {
    const LocalLayout& l = subs_[sid].op.layout();
    const SpatialSubdomain& sub = part_->spatial(l.omega);
    for (int s = std::max(1, l.first_step); s <= l.last_step; ++s)
      for (int a = 0; a < l.nodes; ++a)
        global[global_index(l, s, a)] += local[sid][l.index(s, a)] / part_->multiplicity(sub.dofs[a]);
  }
}

void StbddcPreconditioner::weight_transpose(std::span<const double> r, std::vector<Vector>& local) const {
  local.resize(num_subdomains());
  parallel_for(
      num_subdomains(),
      [&](int sid) {
        const LocalLayout& l = subs_[sid].op.layout();
        const SpatialSubdomain& sub = part_->spatial(l.omega);
        Vector& out = local[sid];
        out.assign(l.size(), 0.0);
        for (int s = std::max(1, l.first_step); s <= l.last_step; ++s)
          for (int a = 0; a < l.nodes; ++a)
            out[l.index(s, a)] = r[global_index(l, s, a)] / part_->multiplicity(sub.dofs[a]);
      },
      options_.threads);
}

void StbddcPreconditioner::constrained_solve(const std::vector<Vector>& s, std::vector<Vector>& u,
                                             std::vector<Vector>* fine_only) const {
  const int nsub = num_subdomains();
  std::vector<Vector> mu(nsub);
  u.resize(nsub);
  if (fine_only) fine_only->resize(nsub);
  parallel_for(
      nsub,
      [&](int sid) {
        const SubdomainData& sd = subs_[sid];
        const SparseMatrix& c = coarse_.subdomains[sid].c;
        u[sid].resize(sd.op.size());
        sd.op.solve(s[sid], u[sid]);
        mu[sid].assign(c.rows(), 0.0);
        if (c.rows() == 0) return;
        Vector cy = c * u[sid];
        sd.schur_lu->solve(cy, mu[sid]);
      },
      options_.threads);
  Vector alpha(coarse_.num_global, 0.0);
  for (int sid = 0; sid < nsub; ++sid) {
    const auto& ids = coarse_.subdomains[sid].global_ids;
    for (std::size_t i = 0; i < ids.size(); ++i) alpha[ids[i]] += mu[sid][i];
  }
  if (coarse_lu_) coarse_lu_->solve(Vector(alpha), alpha);
  parallel_for(
      nsub,
      [&](int sid) {
        const SubdomainData& sd = subs_[sid];
        const SparseMatrix& c = coarse_.subdomains[sid].c;
        const int m = c.rows();
        Vector w(s[sid]);
        if (fine_only) {
          Vector wf(s[sid]);
          if (m > 0) c.multiply_transpose_add(-1.0, mu[sid], wf);
          (*fine_only)[sid].resize(sd.op.size());
          sd.op.solve(wf, (*fine_only)[sid]);
        }
        if (m > 0) {
          const auto& ids = coarse_.subdomains[sid].global_ids;
          Vector a_loc(m), lam(m);
          for (int i = 0; i < m; ++i) a_loc[i] = alpha[ids[i]];
          sd.schur_lu->solve(a_loc, lam);
          for (int i = 0; i < m; ++i) lam[i] = mu[sid][i] - lam[i];
          c.multiply_transpose_add(-1.0, lam, w);
        }
        sd.op.solve(w, u[sid]);
      },
      options_.threads);
}

void StbddcPreconditioner::interior_solve(int sid, std::span<const double> b, std::span<double> x) const {
  const SubdomainData& sd = subs_[sid];
  const std::size_t ni = sd.interior_nodes.size();
  Vector rhs(ni);
  for (int s = 1; s <= sd.interior_steps; ++s) {
    const auto bs = b.subspan((s - 1) * ni, ni);
    std::copy(bs.begin(), bs.end(), rhs.begin());
    const LocalSpatialBlock& blk = sd.op.block(s);
    if (s > 1) blk.mass_interior.multiply_add(1.0, x.subspan((s - 2) * ni, ni), rhs);
    blk.interior->solve(rhs, x.subspan((s - 1) * ni, ni));
  }
}

Vector StbddcPreconditioner::interior_correction(std::span<const double> r) const {
  require(r.size() == size(), ErrorCode::kDimensionMismatch, "interior_correction");
  Vector out(size(), 0.0);
  parallel_for(
      num_subdomains(),
      [&](int sid) {
        const SubdomainData& sd = subs_[sid];
        const LocalLayout& l = sd.op.layout();
        const std::size_t ni = sd.interior_nodes.size();
        if (ni == 0 || sd.interior_steps == 0) return;
        Vector b(ni * sd.interior_steps), x(b.size());
        for (int s = 1; s <= sd.interior_steps; ++s)
          for (std::size_t a = 0; a < ni; ++a) b[(s - 1) * ni + a] = r[global_index(l, s, sd.interior_nodes[a])];
        interior_solve(sid, b, x);
        // V0 supports of different subdomains are disjoint
        for (int s = 1; s <= sd.interior_steps; ++s)
          for (std::size_t a = 0; a < ni; ++a) out[global_index(l, s, sd.interior_nodes[a])] = x[(s - 1) * ni + a];
      },
      options_.threads);
  return out;
}

void StbddcPreconditioner::harmonic_extension(std::span<const double> v, std::span<double> out) const {
  Vector av(size());
  disc_->apply(v, av);
  const Vector c = interior_correction(av);
  for (std::size_t i = 0; i < size(); ++i) out[i] = v[i] - c[i];
}

void StbddcPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  require(r.size() == size() && z.size() == size(), ErrorCode::kDimensionMismatch, "preconditioner apply");
  std::vector<Vector> s, u;
  weight_transpose(r, s);
  constrained_solve(s, u);
  Vector w(size());
  weight(u, w);
  harmonic_extension(w, z);
}

void StbddcPreconditioner::apply_full(std::span<const double> r, std::span<double> z) const {
  const Vector c = interior_correction(r);
  Vector ac(size());
  disc_->apply(c, ac);
  Vector rr(r.begin(), r.end());
  axpy(-1.0, ac, rr);
  apply(rr, z);
  axpy(1.0, c, z);
}

DenseMatrix StbddcPreconditioner::lambda_phi(int sid) const {
  const SubdomainData& sd = subs_[sid];
  if (!sd.schur_lu) return DenseMatrix(0, 0);
  DenseMatrix inv = sd.schur_lu->inverse();
  DenseMatrix out(inv.rows(), inv.cols());
  for (int i = 0; i < inv.rows(); ++i)
    for (int j = 0; j < inv.cols(); ++j) out(i, j) = -inv(i, j);
  return out;
}

DenseMatrix StbddcPreconditioner::phi(int sid) const {
  const SubdomainData& sd = subs_[sid];
  const SparseMatrix& c = coarse_.subdomains[sid].c;
  const int m = c.rows(), n = sd.op.size();
  DenseMatrix out(n, m);
  Vector e(m, 0.0), lam(m), v(n);
  for (int j = 0; j < m; ++j) {
    e[j] = 1.0;
    sd.schur_lu->solve(e, lam);
    e[j] = 0.0;
    std::fill(v.begin(), v.end(), 0.0);
    c.multiply_transpose_add(1.0, lam, v);
    sd.op.solve(v, v);
    out.set_column(j, v);
  }
  return out;
}

DenseMatrix StbddcPreconditioner::psi(int sid) const {
  const SubdomainData& sd = subs_[sid];
  const SparseMatrix& c = coarse_.subdomains[sid].c;
  const int m = c.rows(), n = sd.op.size();
  DenseMatrix out(n, m);
  Vector e(m, 0.0), lam(m), v(n);
  for (int j = 0; j < m; ++j) {
    e[j] = 1.0;
    sd.schur_lu->solve_transpose(e, lam);
    e[j] = 0.0;
    std::fill(v.begin(), v.end(), 0.0);
    c.multiply_transpose_add(1.0, lam, v);
    sd.op.solve_transpose(v, v);
    out.set_column(j, v);
  }
  return out;
}

long long StbddcPreconditioner::block_solves_per_apply() const {
  long long n = 0;
  for (const SubdomainData& sd : subs_) n += 2LL * sd.op.block_solves() + sd.interior_steps;
  return n;
}

}  // namespace stbddc
