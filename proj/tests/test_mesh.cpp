#include <doctest.h>

#include <sstream>

#include "support.hpp"

using namespace robin;
using namespace robin::test;

TEST_CASE("annulus counts for the smallest structured grid") {
  const TriMesh m = annulus(8, 2);
  CHECK(m.num_vertices() == 24);
  CHECK(m.num_triangles() == 32);
  CHECK(m.edges_with(BoundaryTag::Gamma).size() == 8);
  CHECK(m.edges_with(BoundaryTag::GammaD).size() == 8);
}

TEST_CASE("annulus vertices sit exactly on the ring radii") {
  const TriMesh m = build_annulus_mesh(1.0, 2.0, 16, 4);
  for (Index v = 0; v < m.num_vertices(); ++v) {
    const int ring = static_cast<int>(v / 16);
    const double r = std::hypot(m.vertex(v).x, m.vertex(v).y);
    CHECK(r == doctest::Approx(1.0 + 0.25 * ring).epsilon(1e-15));
  }
}

TEST_CASE("polygonal area stays below the annulus area and converges at second order") {
  const double exact = 3.0 * kPi;
  const double a1 = annulus(64, 16).area();
  const double a2 = annulus(128, 32).area();
  CHECK(a1 < exact);
  CHECK(a2 < exact);
  CHECK(exact - a1 < 1e-2 * exact);
  CHECK((exact - a1) / (exact - a2) >= 3.5);
}

TEST_CASE("invalid annulus parameters") {
  CHECK_THROWS_AS(build_annulus_mesh(2.0, 1.0, 8, 2), ParameterError);
  CHECK_THROWS_AS(build_annulus_mesh(1.0, 1.0, 8, 2), ParameterError);
  CHECK_THROWS_AS(build_annulus_mesh(0.0, 1.0, 8, 2), ParameterError);
  CHECK_THROWS_AS(build_annulus_mesh(1.0, 2.0, 7, 2), ParameterError);
  CHECK_THROWS_AS(build_annulus_mesh(1.0, 2.0, 8, 1), ParameterError);
}

TEST_CASE("mesh invariants hold on generated meshes") {
  for (const auto& [nc, nr] : {std::pair{8, 2}, std::pair{33, 5}, std::pair{64, 16}}) {
    const TriMesh m = annulus(nc, nr);
    for (Index t = 0; t < m.num_triangles(); ++t) CHECK(m.signed_area(t) > 0.0);

    double sx = 0.0, sy = 0.0;
    for (const auto& e : m.boundary_edges()) {
      CHECK(std::hypot(e.normal.x, e.normal.y) == doctest::Approx(1.0).epsilon(1e-12));
      // outward: points away from the annulus centre on the outer ring, towards it on the inner one
      const Point& a = m.vertex(e.nodes[0]);
      const Point& b = m.vertex(e.nodes[1]);
      const double radial = 0.5 * ((a.x + b.x) * e.normal.x + (a.y + b.y) * e.normal.y);
      if (e.tag == BoundaryTag::GammaD) CHECK(radial > 0.0);
      else CHECK(radial < 0.0);
      sx += e.length * e.normal.x;
      sy += e.length * e.normal.y;
    }
    CHECK(std::abs(sx) < 1e-10);
    CHECK(std::abs(sy) < 1e-10);
  }
}

TEST_CASE("normals point out of a hand-built triangle") {
  const TriMesh m = unit_triangle();
  for (const auto& e : m.boundary_edges()) {
    const Point& a = m.vertex(e.nodes[0]);
    const Point& b = m.vertex(e.nodes[1]);
    const Point mid{0.5 * (a.x + b.x) - 1.0 / 3.0, 0.5 * (a.y + b.y) - 1.0 / 3.0};
    CHECK(mid.x * e.normal.x + mid.y * e.normal.y > 0.0);
  }
}

TEST_CASE("constructor rejects broken meshes") {
  const std::vector<Point> v = {{0, 0}, {1, 0}, {0, 1}};
  SUBCASE("clockwise triangle") {
    CHECK_THROWS_AS(TriMesh(v, {{0, 2, 1}},
                            {{{0, 1}, BoundaryTag::Gamma}, {{1, 2}, BoundaryTag::GammaD}, {{2, 0}, BoundaryTag::GammaD}}),
                    ValidationError);
  }
  SUBCASE("missing boundary edge") {
    CHECK_THROWS_AS(TriMesh(v, {{0, 1, 2}}, {{{0, 1}, BoundaryTag::Gamma}, {{1, 2}, BoundaryTag::GammaD}}),
                    ValidationError);
  }
  SUBCASE("interior edge tagged") {
    const std::vector<Point> sq = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    CHECK_THROWS_AS(TriMesh(sq, {{0, 1, 2}, {0, 2, 3}},
                            {{{0, 1}, BoundaryTag::Gamma},
                             {{1, 2}, BoundaryTag::GammaD},
                             {{2, 3}, BoundaryTag::GammaD},
                             {{3, 0}, BoundaryTag::GammaD},
                             {{0, 2}, BoundaryTag::GammaD}}),
                    ValidationError);
  }
  SUBCASE("duplicate edge with two tags") {
    CHECK_THROWS_AS(TriMesh(v, {{0, 1, 2}},
                            {{{0, 1}, BoundaryTag::Gamma},
                             {{1, 0}, BoundaryTag::GammaD},
                             {{1, 2}, BoundaryTag::GammaD},
                             {{2, 0}, BoundaryTag::GammaD}}),
                    ValidationError);
  }
  SUBCASE("only one tag present") {
    CHECK_THROWS_AS(TriMesh(v, {{0, 1, 2}},
                            {{{0, 1}, BoundaryTag::GammaD}, {{1, 2}, BoundaryTag::GammaD}, {{2, 0}, BoundaryTag::GammaD}}),
                    ValidationError);
  }
}

TEST_CASE("mesh text round trip is exact") {
  const TriMesh m = build_annulus_mesh(1.0, 2.0, 8, 2);
  std::stringstream ss;
  write_mesh(m, ss);
  const TriMesh back = read_mesh(ss);
  CHECK(back.same_as(m));
  for (Index v = 0; v < m.num_vertices(); ++v) {
    CHECK(back.vertex(v).x == m.vertex(v).x);
    CHECK(back.vertex(v).y == m.vertex(v).y);
  }
  CHECK(back.triangles() == m.triangles());
}

TEST_CASE("mesh files with comments parse") {
  std::istringstream in(
      "# a single triangle\n"
      "robinmesh 1\n"
      "vertices 3\n0 0\n1 0  # right corner\n0 1\n"
      "\n"
      "triangles 1\n0 1 2\n"
      "boundary 3\n0 1 GAMMA\n1 2 GAMMA_D\n2 0 GAMMA_D\n");
  const TriMesh m = read_mesh(in);
  CHECK(m.num_vertices() == 3);
  CHECK(m.boundary_nodes(BoundaryTag::Gamma) == std::vector<Index>{0, 1});
}

TEST_CASE("malformed mesh files report the offending line") {
  SUBCASE("boundary edge with a nonexistent vertex") {
    std::istringstream in(
        "robinmesh 1\nvertices 3\n0 0\n1 0\n0 1\ntriangles 1\n0 1 2\n"
        "boundary 3\n0 1 GAMMA\n1 7 GAMMA_D\n2 0 GAMMA_D\n");
    try {
      read_mesh(in);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 10);
      CHECK(std::string(e.what()).find("line 10") != std::string::npos);
    }
  }
  SUBCASE("bad header") {
    std::istringstream in("robinmesh 2\n");
    CHECK_THROWS_AS(read_mesh(in), ParseError);
  }
  SUBCASE("unknown tag") {
    std::istringstream in(
        "robinmesh 1\nvertices 3\n0 0\n1 0\n0 1\ntriangles 1\n0 1 2\nboundary 3\n0 1 GAMMA\n1 2 WALL\n2 0 GAMMA_D\n");
    CHECK_THROWS_AS(read_mesh(in), ParseError);
  }
  SUBCASE("truncated file") {
    std::istringstream in("robinmesh 1\nvertices 3\n0 0\n1 0\n");
    CHECK_THROWS_AS(read_mesh(in), ParseError);
  }
  SUBCASE("no GAMMA edges") {
    std::istringstream in(
        "robinmesh 1\nvertices 3\n0 0\n1 0\n0 1\ntriangles 1\n0 1 2\n"
        "boundary 3\n0 1 GAMMA_D\n1 2 GAMMA_D\n2 0 GAMMA_D\n");
    CHECK_THROWS_AS(read_mesh(in), ValidationError);
  }
}

TEST_CASE("arc parameterization of the inner circle") {
  const TriMesh m = annulus(8, 2);
  const auto arc = boundary_arc_parameterization(m, BoundaryTag::Gamma);
  REQUIRE(arc.size() == 8);
  CHECK(m.vertex(arc[0].node).x == doctest::Approx(1.0));
  CHECK(arc[0].theta == 0.0);
  for (std::size_t k = 1; k < arc.size(); ++k) {
    CHECK(arc[k].theta - arc[k - 1].theta == doctest::Approx(kPi / 4).epsilon(1e-14));
  }
  bool found = false;
  for (const auto& a : arc) {
    const Point& p = m.vertex(a.node);
    if (std::abs(p.x) < 1e-12 && p.y > 0) {
      CHECK(a.theta == doctest::Approx(kPi / 2).epsilon(1e-15));
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("arc parameterization needs a closed loop") {
  CHECK_THROWS_AS(boundary_arc_parameterization(unit_triangle(), BoundaryTag::Gamma), TopologyError);
}

TEST_CASE("boundary tags print and parse") {
  CHECK(to_string(BoundaryTag::Gamma) == "GAMMA");
  CHECK(to_string(BoundaryTag::GammaD) == "GAMMA_D");
  CHECK(parse_boundary_tag("GAMMA_D") == BoundaryTag::GammaD);
  CHECK_THROWS_AS(parse_boundary_tag("gamma"), InputError);
}
