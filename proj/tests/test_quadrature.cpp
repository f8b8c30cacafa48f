#include <cmath>

#include <doctest.h>

#include "vemac/errors.hpp"
#include "vemac/mesh.hpp"
#include "vemac/quadrature.hpp"

using namespace vemac;

namespace {

PolyMesh one_cell(std::vector<Point2> verts) {
  std::vector<int> ring(verts.size());
  for (size_t i = 0; i < verts.size(); ++i) ring[i] = static_cast<int>(i);
  return build_edges(std::move(verts), {ring});
}

}  // namespace

TEST_CASE("triangle rule weights sum to one") {
  const TriangleRule r = TriangleRule::degree2();
  CHECK(r.weights[0] + r.weights[1] + r.weights[2] == doctest::Approx(1.0).epsilon(1e-15));
  for (const auto& p : r.points)
    CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("moment matrix of the unit square") {
  const PolyMesh mesh = one_cell({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const ElementGeometry g = element_geometry(mesh, 0);
  const Eigen::Matrix3d H = polygon_monomial_moments(g);
  // |E| = 1, and with h = sqrt(2): integral of ((x-1/2)/h)^2 = (1/12)/2 = 1/24.
  CHECK(H(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(H(1, 1) == doctest::Approx(1.0 / 24.0).epsilon(1e-13));
  CHECK(H(2, 2) == doctest::Approx(1.0 / 24.0).epsilon(1e-13));
  // Odd moments vanish by symmetry.
  CHECK(std::abs(H(0, 1)) <= 1e-15);
  CHECK(std::abs(H(0, 2)) <= 1e-15);
  CHECK(std::abs(H(1, 2)) <= 1e-15);
  // Symmetry of the matrix itself.
  CHECK((H - H.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("only degree 1 monomials are provisioned") {
  const PolyMesh mesh = one_cell({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const ElementGeometry g = element_geometry(mesh, 0);
  CHECK_THROWS_AS(polygon_monomial_moments(g, 2), ParameterError);
}

TEST_CASE("degree-2 integration is exact on a nonconvex polygon") {
  // L-shaped hexagon: fan from the centroid fails, ear clipping takes over.
  const PolyMesh mesh = one_cell({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
  const ElementGeometry g = element_geometry(mesh, 0);
  CHECK(g.area == doctest::Approx(3.0).epsilon(1e-14));

  // integral of x^2 over the L: split into [0,2]x[0,1] and [0,1]x[1,2]:
  // 8/3 + 1/3 = 3. integral of xy: [0,2]x[0,1]: 2*(1/2)=1; [0,1]x[1,2]: (1/2)(3/2)=3/4.
  const double ix2 = integrate(g, [](Point2 p) { return p.x * p.x; });
  const double ixy = integrate(g, [](Point2 p) { return p.x * p.y; });
  CHECK(ix2 == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(ixy == doctest::Approx(1.75).epsilon(1e-13));

  // The quadrature weights of the same cell sum to its area.
  double wsum = 0.0;
  for_each_quad_point(g, [&](Point2, double w) { wsum += w; });
  CHECK(wsum == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("edge average integrates quadratics exactly") {
  const double avg = edge_average({0, 0}, {1, 0}, [](Point2 p) { return p.x * p.x; });
  CHECK(avg == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  // Affine average equals the midpoint value (here zero).
  const double affine = edge_average({0, 1}, {2, 3}, [](Point2 p) { return 2 * p.x - p.y; });
  CHECK(std::abs(affine) <= 1e-14);
}

TEST_CASE("triangulation covers the polygon area for both strategies") {
  // Convex: centroid fan.
  const PolyMesh hexmesh = one_cell({{1, 0}, {0.5, 0.9}, {-0.5, 0.9}, {-1, 0}, {-0.5, -0.9},
                                     {0.5, -0.9}});
  const ElementGeometry hexg = element_geometry(hexmesh, 0);
  const auto fan = triangulate(hexg);
  CHECK(fan.size() == 6);
  CHECK(fan[0][0] == -1);

  // The L-hexagon is still star-shaped around its centroid, so it fans too.
  const PolyMesh lmesh = one_cell({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
  const auto lfan = triangulate(element_geometry(lmesh, 0));
  CHECK(lfan.size() == 6);
  CHECK(lfan[0][0] == -1);

  // The arrow's notch hides two edges from the centroid: ears, n-2 triangles.
  const PolyMesh arrow = one_cell({{0, 0}, {4, 0}, {4, 4}, {2, 0.2}, {0, 4}});
  const auto ears = triangulate(element_geometry(arrow, 0));
  CHECK(ears.size() == 3);
  for (const auto& t : ears)
    for (int k : t) CHECK(k >= 0);
}
