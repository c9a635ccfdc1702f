#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "semlab/ax.hpp"
#include "semlab/basis.hpp"
#include "semlab/geometry.hpp"

namespace semlab {

/// Which faces of the box carry homogeneous Dirichlet conditions. The rest
/// are natural (Neumann) boundaries.
enum class DirichletFaces { all, x_min };

/// Direct-stiffness connectivity of a structured box mesh.
class GatherScatterMap {
 public:
  GatherScatterMap(const BoxMesh& mesh, int degree, DirichletFaces faces = DirichletFaces::all);

  int degree() const { return degree_; }
  std::int64_t elements() const { return elements_; }
  std::int64_t num_local() const { return static_cast<std::int64_t>(global_id_.size()); }
  std::int64_t num_global() const { return static_cast<std::int64_t>(multiplicity_.size()); }

  std::span<const std::int64_t> global_ids() const { return global_id_; }
  std::span<const int> multiplicity() const { return multiplicity_; }
  /// 1 on global DOFs with a Dirichlet condition.
  std::span<const std::uint8_t> mask() const { return mask_; }

 private:
  int degree_;
  std::int64_t elements_;
  std::vector<std::int64_t> global_id_;
  std::vector<int> multiplicity_;
  std::vector<std::uint8_t> mask_;
};

GatherScatterMap build_gs_map(const BoxMesh& mesh, int degree,
                              DirichletFaces faces = DirichletFaces::all);

/// global[g] = sum of local copies of g, accumulated in ascending element order.
void gather(const GatherScatterMap& map, std::span<const double> local, std::span<double> global);
/// local copy <- global value.
void scatter(const GatherScatterMap& map, std::span<const double> global, std::span<double> local);
/// Replaces each local copy of a shared DOF with the sum over all its copies.
ElementField gather_scatter(const GatherScatterMap& map, const ElementField& local);

/// The assembled, masked Poisson operator on the global DOF space.
class PoissonOperator {
 public:
  struct Options {
    KernelVariant kernel = KernelVariant::buffered();
    int threads = 0;
    DirichletFaces faces = DirichletFaces::all;
  };

  PoissonOperator(const BoxMesh& mesh, const SpectralBasis& basis, Options options);
  PoissonOperator(const BoxMesh& mesh, const SpectralBasis& basis)
      : PoissonOperator(mesh, basis, Options{}) {}

  std::int64_t size() const { return gs_.num_global(); }
  const GatherScatterMap& map() const { return gs_; }
  const GeomFactors& factors() const { return geom_; }
  const SpectralBasis& basis() const { return basis_; }

  /// out = mask(Q^T A Q in). Counters of the element-local Ax phase are
  /// accumulated into `counters` when given.
  void apply(std::span<const double> in, std::span<double> out, OpCounters* counters = nullptr,
             double* ax_seconds = nullptr) const;

  /// mask(Q^T B f) with the diagonal GLL mass matrix.
  std::vector<double> load_vector(const std::function<double(double, double, double)>& f) const;
  /// Global nodal values of a function.
  std::vector<double> interpolate(const std::function<double(double, double, double)>& f) const;
  /// Zeroes masked entries.
  void apply_mask(std::span<double> v) const;

 private:
  SpectralBasis basis_;
  GatherScatterMap gs_;
  GeomFactors geom_;
  NodalCoordinates coords_;
  Options options_;
};

struct CgResult {
  std::vector<double> solution;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;  // ||r_k||_2, starting with ||r_0||_2
  std::vector<double> ax_gflops;         // per iteration, Ax phase only
};

/// Unpreconditioned conjugate gradients on a masked operator. Stops when
/// ||r_k|| / ||r_0|| <= tol or after max_iters. A zero right-hand side returns
/// the zero solution after 0 iterations. Throws std::runtime_error on NaN/Inf
/// or a non-positive curvature p^T A p.
CgResult cg_solve(const PoissonOperator& op, std::span<const double> rhs, double tol,
                  int max_iters);

/// Solves -lap u = f with homogeneous Dirichlet data on all faces.
CgResult cg_solve(const BoxMesh& mesh, const SpectralBasis& basis,
                  const std::function<double(double, double, double)>& rhs, double tol,
                  int max_iters, PoissonOperator::Options options = {});

struct ManufacturedResult {
  CgResult cg;
  double max_nodal_error = 0.0;
};

/// u* = sin(pi x) sin(pi y) sin(pi z) on the unit cube, f = 3 pi^2 u*.
ManufacturedResult solve_manufactured(const BoxMesh& mesh, const SpectralBasis& basis, double tol,
                                      int max_iters, PoissonOperator::Options options = {});

}  // namespace semlab
