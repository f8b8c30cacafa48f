// Exact integration of degree <= 2 polynomials over polygons and edges,
// which is all the lowest-order scheme needs.
#pragma once

#include <array>
#include <functional>

#include <Eigen/Dense>

#include "vemac/mesh.hpp"

namespace vemac {

// Degree-2 exact rule on the reference triangle (edge midpoints, weights 1/3).
struct TriangleRule {
  // Barycentric coordinates of the quadrature points.
  std::array<std::array<double, 3>, 3> points;
  std::array<double, 3> weights;
  int degree = 2;

  static TriangleRule degree2();
};

// Triangulation of a cell used for quadrature: centroid fan when the
// centroid sees every edge, ear clipping otherwise. Triangles are CCW vertex
// triples into geom.ring.
std::vector<std::array<int, 3>> triangulate(const ElementGeometry& geom);

// Moment matrix H[a][b] = integral over E of m_a * m_b for the scaled
// monomials {1, (x-x_E)/h_E, (y-y_E)/h_E}; symmetric positive definite,
// H[0][0] = |E|. Only max_degree = 1 is provisioned.
Eigen::Matrix3d polygon_monomial_moments(const ElementGeometry& geom, int max_degree = 1);

// Integrates f over the cell with the degree-2 rule on the cell's
// triangulation (exact for polynomials of degree <= 2).
double integrate(const ElementGeometry& geom, const std::function<double(Point2)>& f);

// Visits every point of the same rule as fn(point, weight); the weights sum
// to the cell area. Lets callers accumulate several integrands in one sweep.
void for_each_quad_point(const ElementGeometry& geom,
                         const std::function<void(Point2, double)>& fn);

// Average of a polynomial of degree <= 2 along a segment, via 2-point Gauss.
double edge_average(Point2 a, Point2 b, const std::function<double(Point2)>& poly);

}  // namespace vemac
