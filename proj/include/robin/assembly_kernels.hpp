#pragma once

// Element-level P1 kernels. Each kernel has a serial reference and an OpenMP
// version; both write element t into slot t, so the scattered global matrix
// is bitwise identical whichever kernel produced the element buffer.

#include <array>
#include <vector>

#include <Eigen/SparseCore>

#include "robin/mesh.hpp"

namespace robin::kernels {

using ElementMatrix = std::array<double, 9>;  // row-major 3x3

/// Triangles with |area| below this are rejected by every kernel.
inline constexpr double kMinTriangleArea = 1e-14;

std::vector<ElementMatrix> stiffness_elements_serial(const TriMesh& mesh);
std::vector<ElementMatrix> stiffness_elements_omp(const TriMesh& mesh);

std::vector<ElementMatrix> mass_elements_serial(const TriMesh& mesh);
std::vector<ElementMatrix> mass_elements_omp(const TriMesh& mesh);

/// Sums element matrices into a symmetric sparse matrix. Entry (i,j) and
/// (j,i) receive the same addends in the same order.
Eigen::SparseMatrix<double> scatter(const TriMesh& mesh, const std::vector<ElementMatrix>& elements);

}  // namespace robin::kernels
