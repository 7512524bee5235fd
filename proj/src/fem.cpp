#include "robin/fem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "robin/assembly_kernels.hpp"
#include "robin/errors.hpp"

namespace robin {

namespace {

// Two-point Gauss-Legendre on [0,1].
constexpr double kGaussLo = 0.21132486540518711775;  // (1 - 1/sqrt(3)) / 2
constexpr double kGaussHi = 0.78867513459481288225;

// Block of `a` with rows/cols selected by index maps (full -> local, -1 to drop).
SparseSymMatrix extract(const SparseSymMatrix& a, const std::vector<Index>& row_map, Index n_rows,
                        const std::vector<Index>& col_map, Index n_cols) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (Index col = 0; col < a.outerSize(); ++col) {
    const Index c = col_map[static_cast<std::size_t>(col)];
    if (c < 0) continue;
    for (SparseSymMatrix::InnerIterator it(a, col); it; ++it) {
      const Index r = row_map[static_cast<std::size_t>(it.row())];
      if (r >= 0) triplets.emplace_back(r, c, it.value());
    }
  }
  SparseSymMatrix out(n_rows, n_cols);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

std::vector<Index> local_map(const std::vector<Index>& nodes, Index n) {
  std::vector<Index> map(static_cast<std::size_t>(n), -1);
  for (std::size_t k = 0; k < nodes.size(); ++k) map[static_cast<std::size_t>(nodes[k])] = static_cast<Index>(k);
  return map;
}

void check_full(const TriMesh& mesh, const Vector& v, const char* name) {
  if (v.size() != mesh.num_vertices()) {
    throw InputError(std::string(name) + " has " + std::to_string(v.size()) + " values, mesh has " +
                     std::to_string(mesh.num_vertices()) + " vertices");
  }
}

}  // namespace

BoundaryField BoundaryField::constant(const TriMesh& mesh, BoundaryTag tag, double value) {
  const auto& nodes = mesh.boundary_nodes(tag);
  return {tag, nodes, Vector::Constant(static_cast<Index>(nodes.size()), value)};
}

BoundaryField BoundaryField::from_function(const TriMesh& mesh, BoundaryTag tag,
                                           const std::function<double(const Point&)>& f) {
  BoundaryField out{tag, mesh.boundary_nodes(tag), {}};
  out.values.resize(out.size());
  for (Index k = 0; k < out.size(); ++k) out.values[k] = f(mesh.vertex(out.nodes[static_cast<std::size_t>(k)]));
  return out;
}

BoundaryField BoundaryField::gather(const TriMesh& mesh, BoundaryTag tag, const Vector& full) {
  check_full(mesh, full, "field");
  BoundaryField out{tag, mesh.boundary_nodes(tag), {}};
  out.values.resize(out.size());
  for (Index k = 0; k < out.size(); ++k) out.values[k] = full[out.nodes[static_cast<std::size_t>(k)]];
  return out;
}

Vector BoundaryField::scatter(Index num_vertices) const {
  Vector full = Vector::Zero(num_vertices);
  for (Index k = 0; k < size(); ++k) full[nodes[static_cast<std::size_t>(k)]] = values[k];
  return full;
}

bool BoundaryField::admissible() const {
  return values.size() > 0 && (values.array() > 0.0).all();
}

void BoundaryField::check_on(const TriMesh& mesh) const {
  if (nodes != mesh.boundary_nodes(tag) || values.size() != size()) {
    throw InputError(std::string(to_string(tag)) + " field does not match the mesh boundary nodes");
  }
}

SparseSymMatrix assemble_stiffness(const TriMesh& mesh, ExecutionPolicy policy) {
  return kernels::scatter(mesh, policy == ExecutionPolicy::Parallel ? kernels::stiffness_elements_omp(mesh)
                                                                    : kernels::stiffness_elements_serial(mesh));
}

SparseSymMatrix assemble_mass(const TriMesh& mesh, ExecutionPolicy policy) {
  return kernels::scatter(mesh, policy == ExecutionPolicy::Parallel ? kernels::mass_elements_omp(mesh)
                                                                    : kernels::mass_elements_serial(mesh));
}

SparseSymMatrix assemble_boundary_mass(const TriMesh& mesh, BoundaryTag tag, const Vector& weight) {
  check_full(mesh, weight, "boundary weight");
  std::vector<Eigen::Triplet<double>> triplets;
  for (const auto& e : mesh.boundary_edges()) {
    if (e.tag != tag) continue;
    const Index a = e.nodes[0];
    const Index b = e.nodes[1];
    double local[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    for (double s : {kGaussLo, kGaussHi}) {
      const double phi[2] = {1.0 - s, s};
      const double w = phi[0] * weight[a] + phi[1] * weight[b];
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) local[i][j] += 0.5 * e.length * w * phi[i] * phi[j];
      }
    }
    triplets.emplace_back(a, a, local[0][0]);
    triplets.emplace_back(b, b, local[1][1]);
    triplets.emplace_back(a, b, local[0][1]);
    triplets.emplace_back(b, a, local[0][1]);
  }
  SparseSymMatrix out(mesh.num_vertices(), mesh.num_vertices());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

SparseSymMatrix assemble_boundary_mass(const TriMesh& mesh, BoundaryTag tag) {
  return assemble_boundary_mass(mesh, tag, Vector::Ones(mesh.num_vertices()));
}

SparseSymMatrix assemble_robin_boundary_mass(const TriMesh& mesh, const RobinField& weight) {
  if (weight.tag != BoundaryTag::Gamma) throw InputError("Robin weight must live on GAMMA");
  weight.check_on(mesh);
  return assemble_boundary_mass(mesh, BoundaryTag::Gamma, weight.scatter(mesh.num_vertices()));
}

double domain_inner(const SparseSymMatrix& mass, const Vector& u, const Vector& v) {
  if (u.size() != mass.rows() || v.size() != mass.rows()) throw InputError("field size does not match mass matrix");
  return u.dot(mass * v);
}

double boundary_inner(const TriMesh& mesh, BoundaryTag tag, const Vector& a, const Vector& b,
                      const Vector* weight) {
  check_full(mesh, a, "first field");
  check_full(mesh, b, "second field");
  if (weight != nullptr) check_full(mesh, *weight, "weight");
  double total = 0.0;
  for (const auto& e : mesh.boundary_edges()) {
    if (e.tag != tag) continue;
    const Index p = e.nodes[0];
    const Index q = e.nodes[1];
    double edge = 0.0;
    for (double s : {kGaussLo, kGaussHi}) {
      const double av = (1.0 - s) * a[p] + s * a[q];
      const double bv = (1.0 - s) * b[p] + s * b[q];
      const double wv = weight != nullptr ? (1.0 - s) * (*weight)[p] + s * (*weight)[q] : 1.0;
      edge += av * bv * wv;
    }
    total += 0.5 * e.length * edge;
  }
  return total;
}

DirichletReduction::DirichletReduction(const TriMesh& mesh, BoundaryTag tag)
    : constrained_(mesh.boundary_nodes(tag)),
      full_to_free_(static_cast<std::size_t>(mesh.num_vertices()), -1) {
  std::vector<bool> is_constrained(static_cast<std::size_t>(mesh.num_vertices()), false);
  for (Index v : constrained_) is_constrained[static_cast<std::size_t>(v)] = true;
  for (Index v = 0; v < mesh.num_vertices(); ++v) {
    if (!is_constrained[static_cast<std::size_t>(v)]) {
      full_to_free_[static_cast<std::size_t>(v)] = static_cast<Index>(free_.size());
      free_.push_back(v);
    }
  }
}

SparseSymMatrix DirichletReduction::reduce(const SparseSymMatrix& a) const {
  return extract(a, full_to_free_, free_size(), full_to_free_, free_size());
}

SparseSymMatrix DirichletReduction::coupling(const SparseSymMatrix& a) const {
  const auto cmap = local_map(constrained_, full_size());
  return extract(a, full_to_free_, free_size(), cmap, static_cast<Index>(constrained_.size()));
}

Vector DirichletReduction::restrict_free(const Vector& full) const {
  Vector out(free_size());
  for (Index k = 0; k < free_size(); ++k) out[k] = full[free_[static_cast<std::size_t>(k)]];
  return out;
}

Vector DirichletReduction::restrict_constrained(const Vector& full) const {
  Vector out(static_cast<Index>(constrained_.size()));
  for (std::size_t k = 0; k < constrained_.size(); ++k) out[static_cast<Index>(k)] = full[constrained_[k]];
  return out;
}

Vector DirichletReduction::expand(const Vector& free_values, const Vector* constrained_values) const {
  if (free_values.size() != free_size()) throw InputError("reduced vector has the wrong size");
  Vector full = Vector::Zero(full_size());
  for (Index k = 0; k < free_size(); ++k) full[free_[static_cast<std::size_t>(k)]] = free_values[k];
  if (constrained_values != nullptr) {
    if (constrained_values->size() != static_cast<Index>(constrained_.size())) {
      throw InputError("Dirichlet data has the wrong size");
    }
    for (std::size_t k = 0; k < constrained_.size(); ++k) full[constrained_[k]] = (*constrained_values)[static_cast<Index>(k)];
  }
  return full;
}

Discretization::Discretization(TriMesh mesh, ExecutionPolicy policy)
    : mesh_(std::move(mesh)),
      stiffness_(assemble_stiffness(mesh_, policy)),
      mass_(assemble_mass(mesh_, policy)),
      reduction_(mesh_, BoundaryTag::GammaD) {
  const Index n = mesh_.num_vertices();
  const auto& gn = mesh_.boundary_nodes(BoundaryTag::Gamma);
  const auto& dn = mesh_.boundary_nodes(BoundaryTag::GammaD);
  const auto gmap = local_map(gn, n);
  const auto dmap = local_map(dn, n);
  gamma_mass_ = extract(assemble_boundary_mass(mesh_, BoundaryTag::Gamma), gmap, static_cast<Index>(gn.size()),
                        gmap, static_cast<Index>(gn.size()));
  gamma_d_mass_ = extract(assemble_boundary_mass(mesh_, BoundaryTag::GammaD), dmap, static_cast<Index>(dn.size()),
                          dmap, static_cast<Index>(dn.size()));
  gamma_solver_ = std::make_shared<Eigen::SimplicialLDLT<SparseSymMatrix>>(gamma_mass_);
  gamma_d_solver_ = std::make_shared<Eigen::SimplicialLDLT<SparseSymMatrix>>(gamma_d_mass_);
  if (gamma_solver_->info() != Eigen::Success || gamma_d_solver_->info() != Eigen::Success) {
    throw SingularityError("boundary mass matrix is singular");
  }
}

SparseSymMatrix Discretization::robin_mass(const RobinField& weight) const {
  return assemble_robin_boundary_mass(mesh_, weight);
}

double Discretization::gamma_inner(const BoundaryField& a, const BoundaryField& b) const {
  if (a.tag != BoundaryTag::Gamma || b.tag != BoundaryTag::Gamma) throw InputError("expected GAMMA fields");
  a.check_on(mesh_);
  b.check_on(mesh_);
  return a.values.dot(gamma_mass_ * b.values);
}

double Discretization::gamma_d_inner(const BoundaryField& a, const BoundaryField& b) const {
  if (a.tag != BoundaryTag::GammaD || b.tag != BoundaryTag::GammaD) throw InputError("expected GAMMA_D fields");
  a.check_on(mesh_);
  b.check_on(mesh_);
  return a.values.dot(gamma_d_mass_ * b.values);
}

BoundaryField Discretization::gamma_riesz(const Vector& load_on_gamma_nodes) const {
  const auto& gn = mesh_.boundary_nodes(BoundaryTag::Gamma);
  if (load_on_gamma_nodes.size() != static_cast<Index>(gn.size())) throw InputError("GAMMA load has the wrong size");
  return {BoundaryTag::Gamma, gn, gamma_solver_->solve(load_on_gamma_nodes)};
}

BoundaryField Discretization::flux_from_residual(const Vector& residual) const {
  check_full(mesh_, residual, "residual");
  const auto& dn = mesh_.boundary_nodes(BoundaryTag::GammaD);
  Vector rhs(static_cast<Index>(dn.size()));
  for (std::size_t k = 0; k < dn.size(); ++k) rhs[static_cast<Index>(k)] = residual[dn[k]];
  return {BoundaryTag::GammaD, dn, gamma_d_solver_->solve(rhs)};
}

BoundaryField neumann_trace(const Discretization& disc, const Vector& u, double lambda, const RobinField& h) {
  check_full(disc.mesh(), u, "eigenfunction");
  const Vector residual = disc.stiffness() * u + disc.robin_mass(h) * u - lambda * (disc.mass() * u);
  return disc.flux_from_residual(residual);
}

double v_norm(const Discretization& disc, const RobinField& h, const Vector& v) {
  check_full(disc.mesh(), v, "field");
  const double sq = v.dot(disc.stiffness() * v) + v.dot(disc.robin_mass(h) * v);
  return std::sqrt(std::max(sq, 0.0));
}

}  // namespace robin
