#include "stbddc/dd/subdomain_operator.hpp"

#include <algorithm>

namespace stbddc {

void assemble_local_spatial(const SpaceTimeMesh& mesh, const SpatialSubdomain& sub, int cells_x, int cells_y,
                            const SpatialOperators& ops, SparseMatrix& mass, SparseMatrix& stiffness) {
  std::vector<Triplet> m, k;
  m.reserve(16 * static_cast<std::size_t>(cells_x) * cells_y);
  k.reserve(m.capacity());
  for (int cj = sub.cell_j0; cj < sub.cell_j0 + cells_y; ++cj) {
    for (int ci = sub.cell_i0; ci < sub.cell_i0 + cells_x; ++ci) {
      const ElementMatrices& e = ops.element(mesh.cell(ci, cj));
      const int ii[4] = {ci, ci + 1, ci + 1, ci};
      const int jj[4] = {cj, cj, cj + 1, cj + 1};
      int loc[4];
      for (int a = 0; a < 4; ++a) {
        const int dof = mesh.interior_index(ii[a], jj[a]);
        loc[a] = dof < 0 ? -1 : sub.local_of_global[dof];
      }
      for (int a = 0; a < 4; ++a) {
        if (loc[a] < 0) continue;
        for (int b = 0; b < 4; ++b) {
          if (loc[b] < 0) continue;
          m.push_back({loc[a], loc[b], e.m(a, b)});
          k.push_back({loc[a], loc[b], e.k(a, b)});
        }
      }
    }
  }
  mass = SparseMatrix::from_triplets(sub.num_local(), sub.num_local(), std::move(m));
  stiffness = SparseMatrix::from_triplets(sub.num_local(), sub.num_local(), std::move(k));
}

SubdomainOperator::SubdomainOperator(LocalLayout layout, double dt,
                                     std::vector<std::shared_ptr<const LocalSpatialBlock>> blocks,
                                     PerturbationSigns signs)
    : layout_(layout), dt_(dt), blocks_(std::move(blocks)), signs_(signs) {
  require(static_cast<int>(blocks_.size()) == layout_.num_steps(), ErrorCode::kDimensionMismatch,
          "SubdomainOperator: one spatial block per local step expected");
  for (int s = layout_.first_step; s <= layout_.last_step; ++s) {
    const LocalSpatialBlock& b = block(s);
    const bool ok = diag_kind(s) == Diag::kHalf ? b.half.has_value()
                    : diag_kind(s) == Diag::kLast ? b.last.has_value()
                                                  : b.full.has_value();
    require(ok, ErrorCode::kSingularBlock, "SubdomainOperator: missing diagonal factorization");
  }
}

SubdomainOperator::Diag SubdomainOperator::diag_kind(int step) const {
  if (step == 0) return Diag::kHalf;
  if (step == layout_.last_step && !layout_.last_in_time) return Diag::kLast;
  return Diag::kFull;
}

const SparseLU& SubdomainOperator::diag_lu(int step) const {
  const LocalSpatialBlock& b = block(step);
  switch (diag_kind(step)) {
    case Diag::kHalf:
      return *b.half;
    case Diag::kLast:
      return *b.last;
    default:
      return *b.full;
  }
}

void SubdomainOperator::apply_diag(int step, std::span<const double> u, std::span<double> out,
                                   bool transpose) const {
  const LocalSpatialBlock& b = block(step);
  std::fill(out.begin(), out.end(), 0.0);
  auto add = [&](const SparseMatrix& a, double s) {
    if (transpose) {
      a.multiply_transpose_add(s, u, out);
    } else {
      a.multiply_add(s, u, out);
    }
  };
  switch (diag_kind(step)) {
    case Diag::kHalf:
      add(b.mass, 0.5 * signs_.initial);
      break;
    case Diag::kLast:
      add(b.mass, 1.0 - 0.5 * signs_.final);
      add(b.stiffness, dt_);
      break;
    case Diag::kFull:
      add(b.mass, 1.0);
      add(b.stiffness, dt_);
      break;
  }
}

void SubdomainOperator::apply(std::span<const double> u, std::span<double> out) const {
  require(static_cast<int>(u.size()) == size() && static_cast<int>(out.size()) == size(),
          ErrorCode::kDimensionMismatch, "SubdomainOperator::apply");
  const std::size_t n = layout_.nodes;
  for (int s = layout_.first_step; s <= layout_.last_step; ++s) {
    auto os = out.subspan(layout_.index(s, 0), n);
    apply_diag(s, u.subspan(layout_.index(s, 0), n), os, false);
    if (s > layout_.first_step) block(s).mass.multiply_add(-1.0, u.subspan(layout_.index(s - 1, 0), n), os);
  }
}

void SubdomainOperator::apply_transpose(std::span<const double> u, std::span<double> out) const {
  require(static_cast<int>(u.size()) == size() && static_cast<int>(out.size()) == size(),
          ErrorCode::kDimensionMismatch, "SubdomainOperator::apply_transpose");
  const std::size_t n = layout_.nodes;
  for (int s = layout_.first_step; s <= layout_.last_step; ++s) {
    auto os = out.subspan(layout_.index(s, 0), n);
    apply_diag(s, u.subspan(layout_.index(s, 0), n), os, true);
    if (s < layout_.last_step)
      block(s + 1).mass.multiply_transpose_add(-1.0, u.subspan(layout_.index(s + 1, 0), n), os);
  }
}

void SubdomainOperator::solve(std::span<const double> b, std::span<double> x) const {
  require(static_cast<int>(b.size()) == size() && static_cast<int>(x.size()) == size(),
          ErrorCode::kDimensionMismatch, "SubdomainOperator::solve");
  const std::size_t n = layout_.nodes;
  Vector rhs(n);
  for (int s = layout_.first_step; s <= layout_.last_step; ++s) {
    const auto bs = b.subspan(layout_.index(s, 0), n);
    std::copy(bs.begin(), bs.end(), rhs.begin());
    if (s > layout_.first_step) block(s).mass.multiply_add(1.0, x.subspan(layout_.index(s - 1, 0), n), rhs);
    diag_lu(s).solve(rhs, x.subspan(layout_.index(s, 0), n));
  }
}

void SubdomainOperator::solve_transpose(std::span<const double> b, std::span<double> x) const {
  require(static_cast<int>(b.size()) == size() && static_cast<int>(x.size()) == size(),
          ErrorCode::kDimensionMismatch, "SubdomainOperator::solve_transpose");
  const std::size_t n = layout_.nodes;
  Vector rhs(n);
  for (int s = layout_.last_step; s >= layout_.first_step; --s) {
    const auto bs = b.subspan(layout_.index(s, 0), n);
    std::copy(bs.begin(), bs.end(), rhs.begin());
    if (s < layout_.last_step)
      block(s + 1).mass.multiply_transpose_add(1.0, x.subspan(layout_.index(s + 1, 0), n), rhs);
    diag_lu(s).solve_transpose(rhs, x.subspan(layout_.index(s, 0), n));
  }
}

DenseMatrix SubdomainOperator::to_dense() const {
  const int n = size();
  DenseMatrix a(n, n);
  Vector e(n, 0.0), col(n);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    apply(e, col);
    a.set_column(j, col);
    e[j] = 0.0;
  }
  return a;
}

}  // namespace stbddc
