#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "stbddc/core/dense_matrix.hpp"
#include "stbddc/core/sparse_lu.hpp"
#include "stbddc/core/sparse_matrix.hpp"
#include "stbddc/fem/discretization.hpp"
#include "stbddc/partition/partition.hpp"

namespace stbddc {

/// Signs of the two half-mass perturbation terms. Anything other than +1 breaks
/// the cancellation under assembly; only the mutation checks flip them.
struct PerturbationSigns {
  double initial = 1.0;
  double final = 1.0;
};

/// Spatial matrices of one spatial subdomain for one step-operator set,
/// assembled from its own cells only (Neumann on the interface), with the
/// factorizations the time-block solves need.
struct LocalSpatialBlock {
  SparseMatrix mass;
  SparseMatrix stiffness;
  SparseMatrix mass_interior;        // rows/cols of the subdomain-interior nodes
  std::optional<SparseLU> full;      // M + dt K
  std::optional<SparseLU> last;      // M + dt K - s_f M/2
  std::optional<SparseLU> half;      // s_i M/2
  std::optional<SparseLU> interior;  // (M + dt K) on subdomain-interior nodes
};

/// Perturbed local space-time operator: block lower bidiagonal in time with
/// subdiagonal -M and diagonal blocks
///   s_i M/2       at local step 0 (only when a predecessor slab exists)
///   M + dt K      at the other steps
///   M + dt K - s_f M/2 at the last step when a successor slab exists.
class SubdomainOperator {
 public:
  SubdomainOperator() = default;
  /// blocks[s - layout.first_step] is the spatial block of local step s.
  SubdomainOperator(LocalLayout layout, double dt, std::vector<std::shared_ptr<const LocalSpatialBlock>> blocks,
                    PerturbationSigns signs);

  const LocalLayout& layout() const { return layout_; }
  int size() const { return layout_.size(); }
  const LocalSpatialBlock& block(int step) const { return *blocks_[step - layout_.first_step]; }

  void apply(std::span<const double> u, std::span<double> out) const;
  void apply_transpose(std::span<const double> u, std::span<double> out) const;
  /// Forward march; b and x may alias.
  void solve(std::span<const double> b, std::span<double> x) const;
  /// Backward march with the transposed operator; b and x may alias.
  void solve_transpose(std::span<const double> b, std::span<double> x) const;
  /// Spatial block solves performed by one solve().
  int block_solves() const { return layout_.num_steps(); }

  DenseMatrix to_dense() const;

 private:
  enum class Diag { kHalf, kFull, kLast };
  Diag diag_kind(int step) const;
  void apply_diag(int step, std::span<const double> u, std::span<double> out, bool transpose) const;
  const SparseLU& diag_lu(int step) const;

  LocalLayout layout_;
  double dt_ = 0.0;
  std::vector<std::shared_ptr<const LocalSpatialBlock>> blocks_;
  PerturbationSigns signs_;
};

/// Assembles the local mass/stiffness of spatial subdomain `omega` from the
/// element matrices of `ops`.
void assemble_local_spatial(const SpaceTimeMesh& mesh, const SpatialSubdomain& sub, int cells_x, int cells_y,
                            const SpatialOperators& ops, SparseMatrix& mass, SparseMatrix& stiffness);

}  // namespace stbddc
