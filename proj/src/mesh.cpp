#include "robin/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "robin/errors.hpp"

namespace robin {

std::string_view to_string(BoundaryTag tag) {
  return tag == BoundaryTag::Gamma ? "GAMMA" : "GAMMA_D";
}

BoundaryTag parse_boundary_tag(std::string_view text) {
  if (text == "GAMMA") return BoundaryTag::Gamma;
  if (text == "GAMMA_D") return BoundaryTag::GammaD;
  throw InputError("unknown boundary tag '" + std::string(text) + "'");
}

double polar_angle(const Point& p) {
  double theta = std::atan2(p.y, p.x);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  if (theta >= 2.0 * std::numbers::pi) theta = 0.0;
  return theta;
}

namespace {

using EdgeKey = std::pair<Index, Index>;

EdgeKey make_key(Index a, Index b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

struct EdgeUse {
  int count = 0;
  Index opposite = -1;
};

}  // namespace

TriMesh::TriMesh(std::vector<Point> vertices, std::vector<std::array<Index, 3>> triangles,
                 const std::vector<TaggedEdge>& boundary)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  const Index nv = num_vertices();
  if (nv < 3 || triangles_.empty()) throw ValidationError("mesh needs at least one triangle");

  std::map<EdgeKey, EdgeUse> edges;
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (Index v : tri) {
      if (v < 0 || v >= nv) {
        throw ValidationError("triangle " + std::to_string(t) + " references vertex " +
                              std::to_string(v) + " out of range");
      }
    }
    if (!(signed_area(static_cast<Index>(t)) > 0.0)) {
      throw ValidationError("triangle " + std::to_string(t) + " has non-positive signed area");
    }
    for (int k = 0; k < 3; ++k) {
      auto& use = edges[make_key(tri[k], tri[(k + 1) % 3])];
      ++use.count;
      use.opposite = tri[(k + 2) % 3];
    }
  }

  std::size_t topological_boundary = 0;
  for (const auto& [key, use] : edges) {
    if (use.count > 2) throw ValidationError("non-manifold edge in triangulation");
    if (use.count == 1) ++topological_boundary;
  }

  std::map<EdgeKey, bool> seen;
  bool has_gamma = false;
  bool has_gamma_d = false;
  boundary_.reserve(boundary.size());
  for (const auto& e : boundary) {
    const Index a = e.nodes[0];
    const Index b = e.nodes[1];
    if (a < 0 || a >= nv || b < 0 || b >= nv || a == b) {
      throw ValidationError("boundary edge references invalid vertices");
    }
    const EdgeKey key = make_key(a, b);
    const auto it = edges.find(key);
    if (it == edges.end() || it->second.count != 1) {
      throw ValidationError("boundary edge (" + std::to_string(a) + ", " + std::to_string(b) +
                            ") is not on the topological boundary");
    }
    if (seen[key]) {
      throw ValidationError("boundary edge (" + std::to_string(a) + ", " + std::to_string(b) +
                            ") is tagged more than once");
    }
    seen[key] = true;

    const Point& pa = vertex(a);
    const Point& pb = vertex(b);
    const Point& pc = vertex(it->second.opposite);
    const double tx = pb.x - pa.x;
    const double ty = pb.y - pa.y;
    const double len = std::hypot(tx, ty);
    Point n{ty / len, -tx / len};
    if (n.x * (pc.x - pa.x) + n.y * (pc.y - pa.y) > 0.0) n = {-n.x, -n.y};

    boundary_.push_back(BoundaryEdge{{a, b}, e.tag, n, len});
    (e.tag == BoundaryTag::Gamma ? has_gamma : has_gamma_d) = true;
  }
  if (boundary_.size() != topological_boundary) {
    throw ValidationError("boundary edge list does not cover the topological boundary");
  }
  if (!has_gamma) throw ValidationError("mesh has no GAMMA edges");
  if (!has_gamma_d) throw ValidationError("mesh has no GAMMA_D edges");

  for (const auto& e : boundary_) {
    auto& nodes = e.tag == BoundaryTag::Gamma ? gamma_nodes_ : gamma_d_nodes_;
    nodes.push_back(e.nodes[0]);
    nodes.push_back(e.nodes[1]);
  }
  for (auto* nodes : {&gamma_nodes_, &gamma_d_nodes_}) {
    std::sort(nodes->begin(), nodes->end());
    nodes->erase(std::unique(nodes->begin(), nodes->end()), nodes->end());
  }
}

std::vector<BoundaryEdge> TriMesh::edges_with(BoundaryTag tag) const {
  std::vector<BoundaryEdge> out;
  for (const auto& e : boundary_) {
    if (e.tag == tag) out.push_back(e);
  }
  return out;
}

const std::vector<Index>& TriMesh::boundary_nodes(BoundaryTag tag) const {
  return tag == BoundaryTag::Gamma ? gamma_nodes_ : gamma_d_nodes_;
}

double TriMesh::signed_area(Index triangle) const {
  const auto& tri = triangles_[static_cast<std::size_t>(triangle)];
  const Point& a = vertex(tri[0]);
  const Point& b = vertex(tri[1]);
  const Point& c = vertex(tri[2]);
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double TriMesh::area() const {
  double total = 0.0;
  for (Index t = 0; t < num_triangles(); ++t) total += signed_area(t);
  return total;
}

double TriMesh::boundary_length(BoundaryTag tag) const {
  double total = 0.0;
  for (const auto& e : boundary_) {
    if (e.tag == tag) total += e.length;
  }
  return total;
}

bool TriMesh::same_as(const TriMesh& other) const {
  if (vertices_.size() != other.vertices_.size() || triangles_ != other.triangles_ ||
      boundary_.size() != other.boundary_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i].x != other.vertices_[i].x || vertices_[i].y != other.vertices_[i].y) {
      return false;
    }
  }
  for (std::size_t i = 0; i < boundary_.size(); ++i) {
    if (boundary_[i].nodes != other.boundary_[i].nodes || boundary_[i].tag != other.boundary_[i].tag) {
      return false;
    }
  }
  return true;
}

TriMesh build_annulus_mesh(double r_inner, double r_outer, int n_circum, int n_radial) {
  if (!(r_inner > 0.0) || !(r_outer > 0.0) || !(r_inner < r_outer)) {
    throw ParameterError("annulus radii must satisfy 0 < r_inner < r_outer");
  }
  if (n_circum < 8) throw ParameterError("annulus needs n_circum >= 8");
  if (n_radial < 2) throw ParameterError("annulus needs n_radial >= 2");

  const auto id = [n_circum](int ring, int j) {
    return static_cast<Index>(ring) * n_circum + (j % n_circum);
  };

  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>((n_radial + 1) * n_circum));
  for (int k = 0; k <= n_radial; ++k) {
    const double r = r_inner + k * (r_outer - r_inner) / n_radial;
    for (int j = 0; j < n_circum; ++j) {
      const double theta = 2.0 * std::numbers::pi * j / n_circum;
      vertices.push_back({r * std::cos(theta), r * std::sin(theta)});
    }
  }

  std::vector<std::array<Index, 3>> triangles;
  triangles.reserve(static_cast<std::size_t>(2 * n_radial * n_circum));
  for (int k = 0; k < n_radial; ++k) {
    for (int j = 0; j < n_circum; ++j) {
      // counter-clockwise: outward along the ray, then around the circle
      triangles.push_back({id(k, j), id(k + 1, j), id(k + 1, j + 1)});
      triangles.push_back({id(k, j), id(k + 1, j + 1), id(k, j + 1)});
    }
  }

  std::vector<TriMesh::TaggedEdge> boundary;
  boundary.reserve(static_cast<std::size_t>(2 * n_circum));
  for (int j = 0; j < n_circum; ++j) {
    boundary.push_back({{id(0, j), id(0, j + 1)}, BoundaryTag::Gamma});
  }
  for (int j = 0; j < n_circum; ++j) {
    boundary.push_back({{id(n_radial, j), id(n_radial, j + 1)}, BoundaryTag::GammaD});
  }
  return TriMesh(std::move(vertices), std::move(triangles), boundary);
}

void write_mesh(const TriMesh& mesh, std::ostream& out) {
  out << "robinmesh 1\n";
  out << std::setprecision(17);
  out << "vertices " << mesh.num_vertices() << '\n';
  for (const auto& p : mesh.vertices()) out << p.x << ' ' << p.y << '\n';
  out << "triangles " << mesh.num_triangles() << '\n';
  for (const auto& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "boundary " << mesh.boundary_edges().size() << '\n';
  for (const auto& e : mesh.boundary_edges()) {
    out << e.nodes[0] << ' ' << e.nodes[1] << ' ' << to_string(e.tag) << '\n';
  }
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-empty line with comments stripped; false at end of input.
  bool next(std::string& line) {
    std::string raw;
    while (std::getline(in_, raw)) {
      ++line_no_;
      if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
      if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
      line = raw;
      return true;
    }
    return false;
  }

  std::string expect(const char* what) {
    std::string line;
    if (!next(line)) throw ParseError(line_no_ + 1, std::string("unexpected end of file, expected ") + what);
    return line;
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

std::size_t read_section(LineReader& reader, const std::string& keyword) {
  std::istringstream ss(reader.expect(keyword.c_str()));
  std::string word;
  long long count = -1;
  std::string extra;
  if (!(ss >> word >> count) || word != keyword || count < 0 || (ss >> extra)) {
    throw ParseError(reader.line_no(), "expected '" + keyword + " <count>'");
  }
  return static_cast<std::size_t>(count);
}

}  // namespace

TriMesh read_mesh(std::istream& in) {
  LineReader reader(in);
  {
    std::istringstream ss(reader.expect("header"));
    std::string magic, extra;
    int version = 0;
    if (!(ss >> magic >> version) || magic != "robinmesh" || version != 1 || (ss >> extra)) {
      throw ParseError(reader.line_no(), "expected header 'robinmesh 1'");
    }
  }

  const std::size_t nv = read_section(reader, "vertices");
  std::vector<Point> vertices(nv);
  for (auto& p : vertices) {
    std::istringstream ss(reader.expect("vertex"));
    std::string extra;
    if (!(ss >> p.x >> p.y) || (ss >> extra)) throw ParseError(reader.line_no(), "expected 'x y'");
  }

  const auto check_index = [&](Index v) {
    if (v < 0 || v >= static_cast<Index>(nv)) {
      throw ParseError(reader.line_no(), "vertex index " + std::to_string(v) + " out of range");
    }
  };

  const std::size_t nt = read_section(reader, "triangles");
  std::vector<std::array<Index, 3>> triangles(nt);
  for (auto& t : triangles) {
    std::istringstream ss(reader.expect("triangle"));
    std::string extra;
    if (!(ss >> t[0] >> t[1] >> t[2]) || (ss >> extra)) {
      throw ParseError(reader.line_no(), "expected 'i j k'");
    }
    for (Index v : t) check_index(v);
  }

  const std::size_t nb = read_section(reader, "boundary");
  std::vector<TriMesh::TaggedEdge> boundary(nb);
  for (auto& e : boundary) {
    std::istringstream ss(reader.expect("boundary edge"));
    std::string tag, extra;
    if (!(ss >> e.nodes[0] >> e.nodes[1] >> tag) || (ss >> extra)) {
      throw ParseError(reader.line_no(), "expected 'i j TAG'");
    }
    check_index(e.nodes[0]);
    check_index(e.nodes[1]);
    try {
      e.tag = parse_boundary_tag(tag);
    } catch (const InputError& err) {
      throw ParseError(reader.line_no(), err.what());
    }
  }

  std::string trailing;
  if (reader.next(trailing)) throw ParseError(reader.line_no(), "unexpected content after boundary section");

  return TriMesh(std::move(vertices), std::move(triangles), boundary);
}

void save_mesh(const TriMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  write_mesh(mesh, out);
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

TriMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return read_mesh(in);
}

std::vector<ArcNode> boundary_arc_parameterization(const TriMesh& mesh, BoundaryTag tag) {
  std::map<Index, std::vector<Index>> adjacency;
  for (const auto& e : mesh.boundary_edges()) {
    if (e.tag != tag) continue;
    adjacency[e.nodes[0]].push_back(e.nodes[1]);
    adjacency[e.nodes[1]].push_back(e.nodes[0]);
  }
  if (adjacency.empty()) throw TopologyError("no edges tagged " + std::string(to_string(tag)));
  for (const auto& [node, nbrs] : adjacency) {
    if (nbrs.size() != 2) {
      throw TopologyError(std::string(to_string(tag)) + " boundary is not a closed loop at vertex " +
                          std::to_string(node));
    }
  }

  // walk the loop; a single closed loop visits every tagged node
  const Index start = adjacency.begin()->first;
  Index prev = start;
  Index cur = adjacency.at(start)[0];
  std::size_t visited = 1;
  while (cur != start) {
    const auto& nbrs = adjacency.at(cur);
    const Index next = nbrs[0] == prev ? nbrs[1] : nbrs[0];
    prev = cur;
    cur = next;
    ++visited;
    if (visited > adjacency.size()) break;
  }
  if (visited != adjacency.size()) {
    throw TopologyError(std::string(to_string(tag)) + " boundary has more than one component");
  }

  std::vector<ArcNode> out;
  out.reserve(adjacency.size());
  for (const auto& [node, nbrs] : adjacency) out.push_back({node, polar_angle(mesh.vertex(node))});
  std::sort(out.begin(), out.end(), [](const ArcNode& a, const ArcNode& b) {
    return a.theta < b.theta || (a.theta == b.theta && a.node < b.node);
  });
  return out;
}

}  // namespace robin
