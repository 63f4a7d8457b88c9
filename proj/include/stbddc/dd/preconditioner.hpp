#pragma once

#include <memory>
#include <span>
#include <vector>

#include "stbddc/core/dense_matrix.hpp"
#include "stbddc/core/parallel.hpp"
#include "stbddc/dd/subdomain_operator.hpp"
#include "stbddc/fem/discretization.hpp"
#include "stbddc/partition/constraints.hpp"
#include "stbddc/partition/partition.hpp"

namespace stbddc {

struct StbddcOptions {
  CoarseVariant variant = CoarseVariant::kCornersEdges;
  ConstraintMode mode = ConstraintMode::kSpaceTime;
  PerturbationSigns signs;
  int threads = thread_count();
};

/// Space-time BDDC preconditioner for the backward-Euler system of a
/// Discretization on a SpaceTimePartition.
///
/// The bubble space V0 holds continuous functions that vanish on the spatial
/// interface at every step and on every time-interface step; A0 is block
/// diagonal over space-time subdomains (one zero-start time march each).
class StbddcPreconditioner {
 public:
  StbddcPreconditioner(const Discretization& disc, const SpaceTimePartition& partition, StbddcOptions options = {});

  std::size_t size() const { return disc_->size(); }
  int num_subdomains() const { return static_cast<int>(subs_.size()); }
  double setup_seconds() const { return setup_seconds_; }

  /// z = E W A~^-1 W^T r. Requires r orthogonal to V0.
  void apply(std::span<const double> r, std::span<double> z) const;
  /// z = I0 A0^-1 I0^T r + E W A~^-1 W^T (r - A I0 A0^-1 I0^T r); valid for any r.
  void apply_full(std::span<const double> r, std::span<double> z) const;
  /// I0 A0^-1 I0^T r
  Vector interior_correction(std::span<const double> r) const;
  /// E v = v - I0 A0^-1 I0^T A v
  void harmonic_extension(std::span<const double> v, std::span<double> out) const;
  /// True when V0 is the whole space (no spatial or time interface).
  bool bubble_space_is_everything() const { return interface_dofs_ == 0; }
  /// Space-time DOFs outside V0.
  std::size_t interface_dofs() const { return interface_dofs_; }

  // Building blocks, exposed for verification.
  const SubdomainOperator& subdomain(int sid) const { return subs_[sid].op; }
  const SubdomainConstraints& constraints(int sid) const { return coarse_.subdomains[sid]; }
  const CoarseSpace& coarse_space() const { return coarse_; }
  const DenseMatrix& coarse_matrix() const { return coarse_matrix_; }
  /// Schur complement C A^-1 C^T of a subdomain.
  const DenseMatrix& schur(int sid) const { return subs_[sid].schur; }
  /// Lagrange multipliers of the primal basis system; equals -schur^-1.
  DenseMatrix lambda_phi(int sid) const;
  DenseMatrix phi(int sid) const;
  DenseMatrix psi(int sid) const;

  /// Injection of a continuous global vector into a subdomain's layout.
  void restrict_to(int sid, std::span<const double> global, std::span<double> local) const;
  /// Sum of local vectors into the global layout (no weighting, step 0 kept).
  void assemble(const std::vector<Vector>& local, std::span<double> global) const;
  void weight(const std::vector<Vector>& local, std::span<double> global) const;
  void weight_transpose(std::span<const double> r, std::vector<Vector>& local) const;
  /// u = A~^-1 s on the constrained sub-assembled space; optionally returns
  /// the fine part alone.
  void constrained_solve(const std::vector<Vector>& s, std::vector<Vector>& u,
                         std::vector<Vector>* fine_only = nullptr) const;

  /// Spatial block solves in one apply().
  long long block_solves_per_apply() const;

 private:
  struct SubdomainData {
    SubdomainOperator op;
    DenseMatrix schur;
    std::unique_ptr<DenseLU> schur_lu;
    std::vector<int> interior_nodes;  // local nodes with multiplicity 1
    int interior_steps = 0;           // A0 march length
  };

  void interior_solve(int sid, std::span<const double> b, std::span<double> x) const;
  long long global_index(const LocalLayout& l, int step, int node) const;

  const Discretization* disc_;
  const SpaceTimePartition* part_;
  StbddcOptions options_;
  CoarseSpace coarse_;
  std::vector<SubdomainData> subs_;
  DenseMatrix coarse_matrix_;
  std::unique_ptr<DenseLU> coarse_lu_;
  std::size_t interface_dofs_ = 0;
  double setup_seconds_ = 0.0;
};

}  // namespace stbddc
