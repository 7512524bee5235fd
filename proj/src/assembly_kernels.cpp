#include "robin/assembly_kernels.hpp"

#include <cmath>
#include <string>

#include "robin/errors.hpp"

namespace robin::kernels {

namespace {

// Returns false for degenerate triangles instead of throwing so the OpenMP
// loops can report the failure after the parallel region.
bool stiffness_element(const TriMesh& mesh, Index t, ElementMatrix& ke) {
  const auto& tri = mesh.triangles()[static_cast<std::size_t>(t)];
  const double area = mesh.signed_area(t);
  if (std::abs(area) < kMinTriangleArea) return false;
  // grad(phi_k) = (y_{k+1} - y_{k+2}, x_{k+2} - x_{k+1}) / (2 area)
  double gx[3];
  double gy[3];
  for (int k = 0; k < 3; ++k) {
    const Point& p1 = mesh.vertex(tri[(k + 1) % 3]);
    const Point& p2 = mesh.vertex(tri[(k + 2) % 3]);
    gx[k] = (p1.y - p2.y) / (2.0 * area);
    gy[k] = (p2.x - p1.x) / (2.0 * area);
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) ke[3 * i + j] = area * (gx[i] * gx[j] + gy[i] * gy[j]);
  }
  return true;
}

bool mass_element(const TriMesh& mesh, Index t, ElementMatrix& me) {
  const double area = mesh.signed_area(t);
  if (std::abs(area) < kMinTriangleArea) return false;
  const double off = area / 12.0;
  const double diag = 2.0 * off;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) me[3 * i + j] = i == j ? diag : off;
  }
  return true;
}

template <class Kernel>
std::vector<ElementMatrix> run_serial(const TriMesh& mesh, Kernel kernel) {
  std::vector<ElementMatrix> out(static_cast<std::size_t>(mesh.num_triangles()));
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    if (!kernel(mesh, t, out[static_cast<std::size_t>(t)])) {
      throw AssemblyError("degenerate triangle " + std::to_string(t));
    }
  }
  return out;
}

template <class Kernel>
std::vector<ElementMatrix> run_omp(const TriMesh& mesh, Kernel kernel) {
  const Index n = mesh.num_triangles();
  std::vector<ElementMatrix> out(static_cast<std::size_t>(n));
  Index first_bad = n;
#pragma omp parallel for schedule(static) reduction(min : first_bad)
  for (Index t = 0; t < n; ++t) {
    if (!kernel(mesh, t, out[static_cast<std::size_t>(t)]) && t < first_bad) first_bad = t;
  }
  if (first_bad < n) throw AssemblyError("degenerate triangle " + std::to_string(first_bad));
  return out;
}

}  // namespace

std::vector<ElementMatrix> stiffness_elements_serial(const TriMesh& mesh) {
  return run_serial(mesh, stiffness_element);
}

std::vector<ElementMatrix> stiffness_elements_omp(const TriMesh& mesh) {
  return run_omp(mesh, stiffness_element);
}

std::vector<ElementMatrix> mass_elements_serial(const TriMesh& mesh) {
  return run_serial(mesh, mass_element);
}

std::vector<ElementMatrix> mass_elements_omp(const TriMesh& mesh) {
  return run_omp(mesh, mass_element);
}

Eigen::SparseMatrix<double> scatter(const TriMesh& mesh, const std::vector<ElementMatrix>& elements) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(elements.size() * 9);
  for (std::size_t t = 0; t < elements.size(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const auto& e = elements[t];
    for (int i = 0; i < 3; ++i) {
      triplets.emplace_back(tri[i], tri[i], e[3 * i + i]);
      for (int j = i + 1; j < 3; ++j) {
        // symmetric insertion: both halves get the (i,j) value
        const double v = e[3 * i + j];
        triplets.emplace_back(tri[i], tri[j], v);
        triplets.emplace_back(tri[j], tri[i], v);
      }
    }
  }
  const auto n = mesh.num_vertices();
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

}  // namespace robin::kernels
