#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <utility>
#include <vector>

namespace robin {

using Index = std::int64_t;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Boundary part: GAMMA is the inaccessible Robin boundary, GAMMA_D the
/// accessible Dirichlet boundary where the Neumann trace is measured.
enum class BoundaryTag { Gamma, GammaD };

std::string_view to_string(BoundaryTag tag);
BoundaryTag parse_boundary_tag(std::string_view text);

struct BoundaryEdge {
  std::array<Index, 2> nodes{};
  BoundaryTag tag = BoundaryTag::Gamma;
  Point normal;  // outward unit normal
  double length = 0.0;
};

/// Conforming triangulation of a 2D domain with a tagged boundary.
///
/// The constructor validates every invariant (positive orientation, boundary
/// edges matching the topological boundary, both tags present, unit outward
/// normals) and computes the edge normals. Instances are immutable.
class TriMesh {
 public:
  struct TaggedEdge {
    std::array<Index, 2> nodes;
    BoundaryTag tag;
  };

  TriMesh(std::vector<Point> vertices, std::vector<std::array<Index, 3>> triangles,
          const std::vector<TaggedEdge>& boundary);

  Index num_vertices() const { return static_cast<Index>(vertices_.size()); }
  Index num_triangles() const { return static_cast<Index>(triangles_.size()); }

  const std::vector<Point>& vertices() const { return vertices_; }
  const Point& vertex(Index i) const { return vertices_[static_cast<std::size_t>(i)]; }
  const std::vector<std::array<Index, 3>>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_; }

  /// Edges carrying `tag`, in file order.
  std::vector<BoundaryEdge> edges_with(BoundaryTag tag) const;

  /// Ascending, duplicate-free list of vertices touched by edges with `tag`.
  const std::vector<Index>& boundary_nodes(BoundaryTag tag) const;

  double signed_area(Index triangle) const;
  double area() const;
  double boundary_length(BoundaryTag tag) const;

  /// Exact equality of coordinates, connectivity and boundary tags.
  bool same_as(const TriMesh& other) const;

 private:
  std::vector<Point> vertices_;
  std::vector<std::array<Index, 3>> triangles_;
  std::vector<BoundaryEdge> boundary_;
  std::vector<Index> gamma_nodes_;
  std::vector<Index> gamma_d_nodes_;
};

/// Structured annulus r_inner < r < r_outer: n_radial rings of n_circum
/// quadrilaterals, each split into two triangles. Inner circle is GAMMA,
/// outer circle is GAMMA_D.
TriMesh build_annulus_mesh(double r_inner, double r_outer, int n_circum, int n_radial);

void write_mesh(const TriMesh& mesh, std::ostream& out);
TriMesh read_mesh(std::istream& in);
void save_mesh(const TriMesh& mesh, const std::filesystem::path& path);
TriMesh load_mesh(const std::filesystem::path& path);

struct ArcNode {
  Index node;
  double theta;  // in [0, 2*pi)
};

/// Nodes of the `tag` boundary sorted by polar angle. Throws TopologyError
/// unless the tagged edges form exactly one closed loop.
std::vector<ArcNode> boundary_arc_parameterization(const TriMesh& mesh, BoundaryTag tag);

/// atan2 mapped to [0, 2*pi).
double polar_angle(const Point& p);

}  // namespace robin
