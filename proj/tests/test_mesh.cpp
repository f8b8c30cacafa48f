#include <cmath>
#include <numbers>

#include <doctest.h>

#include "vemac/errors.hpp"
#include "vemac/generators.hpp"
#include "vemac/mesh.hpp"

using namespace vemac;

namespace {

PolyMesh two_quads() {
  // Two unit squares sharing one edge: 6 vertices, 7 edges, 1 interior edge.
  return build_edges({{0, 0}, {1, 0}, {2, 0}, {0, 1}, {1, 1}, {2, 1}},
                     {{0, 1, 4, 3}, {1, 2, 5, 4}});
}

}  // namespace

TEST_CASE("two shared-edge quads give seven edges") {
  const PolyMesh mesh = two_quads();
  CHECK(mesh.n_edges() == 7);
  int interior = 0, boundary = 0;
  for (const auto& e : mesh.edges) {
    if (e.boundary) {
      ++boundary;
      CHECK(e.cell1 == -1);
    } else {
      ++interior;
      CHECK(e.cell0 != e.cell1);
      CHECK(e.cell1 >= 0);
    }
    CHECK(e.v0 < e.v1);
  }
  CHECK(interior == 1);
  CHECK(boundary == 6);
}

TEST_CASE("uniform N x N grid has 2N(N+1) edges") {
  for (int n : {2, 5, 8}) {
    const PolyMesh mesh = generate_rect_quads(n, n, 1.0, 1.0);
    CHECK(mesh.n_edges() == 2 * n * (n + 1));
  }
  CHECK(generate_rect_quads(8, 8, 1.0, 1.1).n_edges() == 144);
}

TEST_CASE("cell_edges walks the cell boundary in order") {
  const PolyMesh mesh = two_quads();
  REQUIRE(mesh.cell_edges.size() == 2);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    REQUIRE(mesh.cell_edges[c].size() == mesh.cells[c].size());
    for (size_t k = 0; k < mesh.cells[c].size(); ++k) {
      const int a = mesh.cells[c][k];
      const int b = mesh.cells[c][(k + 1) % mesh.cells[c].size()];
      const Edge& e = mesh.edges[mesh.cell_edges[c][k]];
      CHECK(std::min(a, b) == e.v0);
      CHECK(std::max(a, b) == e.v1);
    }
  }
}

TEST_CASE("non-manifold and malformed cells are rejected") {
  std::vector<Point2> verts = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {2, 0}, {-1, 0}};
  // Three cells traversing the same edge 0-1.
  CHECK_THROWS_AS(build_edges(verts, {{0, 1, 2}, {1, 0, 3}, {0, 1, 4}}), TopologyError);
  // Malformed single cells are format errors, not topology errors.
  CHECK_THROWS_AS(build_edges(verts, {{0, 1, 1, 2}}), FormatError);
  CHECK_THROWS_AS(build_edges(verts, {{0, 1}}), FormatError);
  CHECK_THROWS_AS(build_edges(verts, {{0, 1, 99}}), FormatError);
}

TEST_CASE("element geometry of the unit square") {
  const PolyMesh mesh = build_edges({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2, 3}});
  const ElementGeometry g = element_geometry(mesh, 0);
  CHECK(g.area == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g.centroid.x == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(g.centroid.y == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(g.diameter == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  REQUIRE(g.n_edges() == 4);
  // Outward normals: bottom edge first (0->1).
  CHECK(g.edge_normal[0].y == doctest::Approx(-1.0));
  CHECK(g.edge_length[0] == doctest::Approx(1.0));
  CHECK(g.edge_midpoint[0].x == doctest::Approx(0.5));
}

TEST_CASE("regular hexagon of circumradius 1 has area 3 sqrt(3) / 2") {
  const double pi = std::numbers::pi;
  std::vector<Point2> verts;
  for (int k = 0; k < 6; ++k) verts.push_back({std::cos(pi * k / 3.0), std::sin(pi * k / 3.0)});
  const PolyMesh mesh = build_edges(verts, {{0, 1, 2, 3, 4, 5}});
  const ElementGeometry g = element_geometry(mesh, 0);
  CHECK(g.area == doctest::Approx(3.0 * std::sqrt(3.0) / 2.0).epsilon(1e-14));
  CHECK(g.diameter == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("clockwise cells are a geometry error") {
  const PolyMesh mesh = build_edges({{0, 0}, {0, 1}, {1, 1}, {1, 0}}, {{0, 1, 2, 3}});
  CHECK_THROWS_AS(element_geometry(mesh, 0), GeometryError);
}

TEST_CASE("validate reports star-shape and separation checks without throwing") {
  const PolyMesh good = generate_rect_quads(4, 4, 1.0, 1.1);
  const MeshQualityReport rep = validate(good);
  CHECK(rep.pass());
  CHECK(rep.a1_failures.empty());
  CHECK(rep.a2_failures.empty());
  CHECK(rep.h == doctest::Approx(mesh_size(good)));

  // A nonconvex cell whose centroid does not see every edge trips A1 but
  // still only counts failures.
  const PolyMesh bad =
      build_edges({{0, 0}, {4, 0}, {4, 4}, {2, 0.2}, {0, 4}}, {{0, 1, 2, 3, 4}});
  const MeshQualityReport rep2 = validate(bad);
  CHECK(!rep2.a1_failures.empty());
  CHECK_FALSE(rep2.pass());
}

TEST_CASE("total area and mesh size of a rectangle partition") {
  const PolyMesh mesh = generate_rect_quads(8, 8, 1.0, 1.1);
  CHECK(total_area(mesh) == doctest::Approx(1.1).epsilon(1e-12));
  const double hx = 1.0 / 8.0, hy = 1.1 / 8.0;
  CHECK(mesh_size(mesh) == doctest::Approx(std::hypot(hx, hy)).epsilon(1e-12));
}
