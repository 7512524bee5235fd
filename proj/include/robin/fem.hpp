#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "robin/mesh.hpp"

namespace robin {

using Vector = Eigen::VectorXd;
using SparseSymMatrix = Eigen::SparseMatrix<double>;

enum class ExecutionPolicy { Serial, Parallel };

/// Nodal values on one tagged boundary part, keyed by vertex index.
///
/// The same type houses the Robin coefficient h and perturbation directions
/// on GAMMA, and Neumann data on GAMMA_D. `nodes` is always the ascending
/// list `mesh.boundary_nodes(tag)`.
struct BoundaryField {
  BoundaryTag tag = BoundaryTag::Gamma;
  std::vector<Index> nodes;
  Vector values;

  static BoundaryField constant(const TriMesh& mesh, BoundaryTag tag, double value);
  static BoundaryField from_function(const TriMesh& mesh, BoundaryTag tag,
                                     const std::function<double(const Point&)>& f);
  /// Picks the tagged nodes out of a full nodal vector.
  static BoundaryField gather(const TriMesh& mesh, BoundaryTag tag, const Vector& full);

  Index size() const { return static_cast<Index>(nodes.size()); }

  /// Full nodal vector, zero away from the tagged nodes.
  Vector scatter(Index num_vertices) const;

  /// Admissible as a Robin coefficient: every value strictly positive.
  bool admissible() const;

  /// Throws InputError unless `nodes` matches `mesh.boundary_nodes(tag)`.
  void check_on(const TriMesh& mesh) const;
};

using RobinField = BoundaryField;

SparseSymMatrix assemble_stiffness(const TriMesh& mesh, ExecutionPolicy policy = ExecutionPolicy::Serial);
SparseSymMatrix assemble_mass(const TriMesh& mesh, ExecutionPolicy policy = ExecutionPolicy::Serial);

/// \int_{tag} w phi_i phi_j ds with w the P1 interpolant of a full nodal
/// vector, two-point Gauss per edge (exact for the cubic integrand).
SparseSymMatrix assemble_boundary_mass(const TriMesh& mesh, BoundaryTag tag, const Vector& weight);
SparseSymMatrix assemble_boundary_mass(const TriMesh& mesh, BoundaryTag tag);
SparseSymMatrix assemble_robin_boundary_mass(const TriMesh& mesh, const RobinField& weight);

/// u^T M v.
double domain_inner(const SparseSymMatrix& mass, const Vector& u, const Vector& v);

/// \int_{tag} a b w ds over the tagged polyline, all three fields P1.
double boundary_inner(const TriMesh& mesh, BoundaryTag tag, const Vector& a, const Vector& b,
                      const Vector* weight = nullptr);

/// Elimination of the Dirichlet nodes of one boundary tag.
class DirichletReduction {
 public:
  DirichletReduction(const TriMesh& mesh, BoundaryTag tag = BoundaryTag::GammaD);

  Index full_size() const { return static_cast<Index>(full_to_free_.size()); }
  Index free_size() const { return static_cast<Index>(free_.size()); }
  const std::vector<Index>& free_nodes() const { return free_; }
  const std::vector<Index>& constrained_nodes() const { return constrained_; }
  /// -1 for constrained nodes.
  Index free_index(Index full) const { return full_to_free_[static_cast<std::size_t>(full)]; }

  /// Free-free block.
  SparseSymMatrix reduce(const SparseSymMatrix& a) const;
  /// Free-constrained coupling block, used to lift nonhomogeneous data.
  SparseSymMatrix coupling(const SparseSymMatrix& a) const;

  Vector restrict_free(const Vector& full) const;
  Vector restrict_constrained(const Vector& full) const;
  /// Full vector with `free_values` on free nodes and `constrained_values`
  /// (in constrained_nodes() order) on the eliminated ones; zero if omitted.
  Vector expand(const Vector& free_values, const Vector* constrained_values = nullptr) const;

 private:
  std::vector<Index> free_;
  std::vector<Index> constrained_;
  std::vector<Index> full_to_free_;
};

/// Per-mesh matrices shared by the forward, sensitivity and adjoint solvers.
class Discretization {
 public:
  explicit Discretization(TriMesh mesh, ExecutionPolicy policy = ExecutionPolicy::Serial);

  const TriMesh& mesh() const { return mesh_; }
  const SparseSymMatrix& stiffness() const { return stiffness_; }
  const SparseSymMatrix& mass() const { return mass_; }
  const DirichletReduction& reduction() const { return reduction_; }

  /// B(w): GAMMA boundary mass weighted by w.
  SparseSymMatrix robin_mass(const RobinField& weight) const;

  /// \int_gamma a b ds for two GAMMA fields.
  double gamma_inner(const BoundaryField& a, const BoundaryField& b) const;
  /// \int_{Gamma_D} a b ds for two GAMMA_D fields.
  double gamma_d_inner(const BoundaryField& a, const BoundaryField& b) const;

  /// Solves B_gamma x = load restricted to GAMMA nodes: the L2(gamma)
  /// representer of a linear functional given by its nodal load vector.
  BoundaryField gamma_riesz(const Vector& load_on_gamma_nodes) const;

  /// Consistent flux: solves B_D g = r on GAMMA_D nodes for a full residual
  /// vector r (weak-form residual of some field tested by every hat).
  BoundaryField flux_from_residual(const Vector& residual) const;

 private:
  TriMesh mesh_;
  SparseSymMatrix stiffness_;
  SparseSymMatrix mass_;
  DirichletReduction reduction_;
  SparseSymMatrix gamma_mass_;    // restricted to GAMMA nodes
  SparseSymMatrix gamma_d_mass_;  // restricted to GAMMA_D nodes
  std::shared_ptr<Eigen::SimplicialLDLT<SparseSymMatrix>> gamma_solver_;
  std::shared_ptr<Eigen::SimplicialLDLT<SparseSymMatrix>> gamma_d_solver_;
};

/// Neumann trace du/dnu on GAMMA_D by variational flux recovery:
/// B_D g = r_D with r = (K + B(h) - lambda M) u.
BoundaryField neumann_trace(const Discretization& disc, const Vector& u, double lambda, const RobinField& h);

/// V-norm (u^T K u + u^T B(h) u)^{1/2}.
double v_norm(const Discretization& disc, const RobinField& h, const Vector& v);

}  // namespace robin
