#include <cmath>
#include <numbers>
#include <set>

#include <doctest.h>

#include "vemac/errors.hpp"
#include "vemac/generators.hpp"
#include "vemac/mesh.hpp"

using namespace vemac;

TEST_CASE("rect quads: counts and exact area") {
  const PolyMesh mesh = generate_rect_quads(8, 8, 1.0, 1.1);
  CHECK(mesh.n_cells() == 64);
  CHECK(mesh.n_vertices() == 81);
  CHECK(mesh.n_edges() == 144);
  CHECK(std::abs(total_area(mesh) - 1.1) <= 1e-12 * 1.1);
  CHECK(validate(mesh).pass());
}

TEST_CASE("rect distorted keeps topology and the boundary") {
  const PolyMesh ref = generate_rect_quads(6, 6, 1.0, 1.1);
  const PolyMesh mesh = generate_rect_distorted(6, 6, 1.0, 1.1, 0.2, 42);
  REQUIRE(mesh.n_cells() == ref.n_cells());
  REQUIRE(mesh.n_vertices() == ref.n_vertices());
  CHECK(std::abs(total_area(mesh) - 1.1) <= 1e-12 * 1.1);

  // Boundary vertices stay put; at least one interior vertex moves.
  int moved = 0;
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const bool on_boundary = ref.vertices[v].x < 1e-14 || ref.vertices[v].x > 1.0 - 1e-14 ||
                             ref.vertices[v].y < 1e-14 || ref.vertices[v].y > 1.1 - 1e-14;
    const double d = dist(mesh.vertices[v], ref.vertices[v]);
    if (on_boundary) CHECK(d == 0.0);
    if (d > 0.0) ++moved;
  }
  CHECK(moved > 0);
  CHECK(validate(mesh).pass());

  CHECK_THROWS_AS(generate_rect_distorted(6, 6, 1.0, 1.1, 0.5, 42), ParameterError);

  // Determinism and seed sensitivity.
  const PolyMesh again = generate_rect_distorted(6, 6, 1.0, 1.1, 0.2, 42);
  bool identical = true;
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (dist(mesh.vertices[v], again.vertices[v]) != 0.0) identical = false;
  CHECK(identical);
  const PolyMesh other = generate_rect_distorted(6, 6, 1.0, 1.1, 0.2, 43);
  bool differs = false;
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (dist(mesh.vertices[v], other.vertices[v]) != 0.0) differs = true;
  CHECK(differs);
}

TEST_CASE("rect triangles: 4 cells per quad, exact area") {
  const PolyMesh mesh = generate_rect_triangles(4, 4, 1.0, 1.1, 0.2, 7);
  CHECK(mesh.n_cells() == 4 * 16);
  for (const auto& cell : mesh.cells) CHECK(cell.size() == 3);
  CHECK(std::abs(total_area(mesh) - 1.1) <= 1e-12 * 1.1);
  CHECK(validate(mesh).pass());
}

TEST_CASE("Lloyd Voronoi fills the rectangle with the requested cell count") {
  const PolyMesh mesh = generate_voronoi_lloyd(VoronoiDomain::rectangle(1.0, 1.1), 36, 10, 3);
  CHECK(mesh.n_cells() == 36);
  CHECK(std::abs(total_area(mesh) - 1.1) <= 1e-10 * 1.1);
  CHECK(validate(mesh).pass());

  // Same seed twice: identical geometry.
  const PolyMesh again = generate_voronoi_lloyd(VoronoiDomain::rectangle(1.0, 1.1), 36, 10, 3);
  REQUIRE(again.n_vertices() == mesh.n_vertices());
  for (int v = 0; v < mesh.n_vertices(); ++v)
    CHECK(dist(mesh.vertices[v], again.vertices[v]) == 0.0);

  CHECK_THROWS_AS(generate_voronoi_lloyd(VoronoiDomain::rectangle(1.0, 1.0), 0, 1, 1),
                  ParameterError);
}

TEST_CASE("L-shape quads: n=8 gives 48 cells of the right area") {
  const PolyMesh mesh = generate_lshape(MeshFamily::quads, 8);
  CHECK(mesh.n_cells() == 48);
  CHECK(std::abs(total_area(mesh) - 3.0) <= 1e-12 * 3.0);
  CHECK(validate(mesh).pass());
  // No cell centroid may sit inside the removed quadrant x<0, y<0.
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const ElementGeometry g = element_geometry(mesh, c);
    CHECK_FALSE((g.centroid.x < 0.0 && g.centroid.y < 0.0));
  }
  CHECK_THROWS_AS(generate_lshape(MeshFamily::quads, 7), FormatError);
}

TEST_CASE("L-shape variants cover the same domain") {
  for (MeshFamily fam :
       {MeshFamily::distorted, MeshFamily::triangles, MeshFamily::voronoi}) {
    const PolyMesh mesh = generate_lshape(fam, 8, 5);
    CHECK(std::abs(total_area(mesh) - 3.0) <= 1e-9 * 3.0);
    CHECK(mesh.n_cells() > 0);
    CHECK(validate(mesh).pass());
  }
}

TEST_CASE("ring meshes live between the two circles") {
  const double r0 = kRingInnerRadius, r1 = kRingOuterRadius;
  const double ring_area = std::numbers::pi * (r1 * r1 - r0 * r0);
  for (MeshFamily fam : {MeshFamily::voronoi, MeshFamily::triangles}) {
    const PolyMesh mesh = generate_ring(fam, 24, 11);
    CHECK(mesh.n_cells() > 0);

    // Boundary vertices sit on one of the circles to machine accuracy;
    // interior ones strictly between them.
    std::set<int> boundary_verts;
    for (const auto& e : mesh.edges)
      if (e.boundary) {
        boundary_verts.insert(e.v0);
        boundary_verts.insert(e.v1);
      }
    REQUIRE(!boundary_verts.empty());
    for (int v : boundary_verts) {
      const double r2 = mesh.vertices[v].x * mesh.vertices[v].x +
                        mesh.vertices[v].y * mesh.vertices[v].y;
      const double inner_miss = std::abs(r2 - r0 * r0);
      const double outer_miss = std::abs(r2 - r1 * r1);
      CHECK(std::min(inner_miss, outer_miss) <= 1e-12);
    }
    for (int v = 0; v < mesh.n_vertices(); ++v) {
      const double r = std::hypot(mesh.vertices[v].x, mesh.vertices[v].y);
      CHECK(r >= r0 - 1e-9);
      CHECK(r <= r1 + 1e-9);
    }

    // The polygonal area approaches the annulus area from below (straight
    // chords cut the curved boundary); 24 boundary cells keep it within ~2%.
    CHECK(total_area(mesh) < ring_area);
    CHECK(total_area(mesh) > 0.96 * ring_area);
    CHECK(validate(mesh).pass());
  }
  CHECK_THROWS_AS(generate_ring(MeshFamily::voronoi, 4, 1), ParameterError);
  CHECK_THROWS_AS(generate_ring(MeshFamily::quads, 24, 1), ParameterError);
}

TEST_CASE("ring boundary cell count tracks the requested resolution") {
  for (int nb : {24, 48}) {
    const PolyMesh mesh = generate_ring(MeshFamily::triangles, nb, 2);
    std::set<int> boundary_cells;
    for (const auto& e : mesh.edges)
      if (e.boundary) boundary_cells.insert(e.cell0);
    // Half the boundary cells hug each circle by construction.
    CHECK(static_cast<int>(boundary_cells.size()) == 2 * (nb / 2));
  }
}

TEST_CASE("family names round-trip") {
  for (MeshFamily fam : {MeshFamily::quads, MeshFamily::distorted, MeshFamily::voronoi,
                         MeshFamily::triangles})
    CHECK(parse_family(family_name(fam)) == fam);
  CHECK_THROWS_AS(parse_family("hexes"), FormatError);
}
