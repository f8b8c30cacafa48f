#include "vemac/quadrature.hpp"

#include <cmath>

#include "vemac/errors.hpp"

namespace vemac {

TriangleRule TriangleRule::degree2() {
  // Midpoint rule: exact through degree 2, all weights 1/3.
  TriangleRule r;
  r.points = {{{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}}};
  r.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  r.degree = 2;
  return r;
}

namespace {

double tri_signed_area(Point2 a, Point2 b, Point2 c) { return 0.5 * cross(b - a, c - a); }

std::vector<std::array<int, 3>> ear_clip(const ElementGeometry& geom) {
  const int n = geom.n_edges();
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::vector<std::array<int, 3>> tris;
  const double area_tol = 1e-14 * geom.diameter * geom.diameter;

  auto inside_tri = [&](Point2 p, Point2 a, Point2 b, Point2 c) {
    const double s1 = cross(b - a, p - a);
    const double s2 = cross(c - b, p - b);
    const double s3 = cross(a - c, p - c);
    return s1 > -area_tol && s2 > -area_tol && s3 > -area_tol;
  };

  while (idx.size() > 3) {
    bool clipped = false;
    for (size_t k = 0; k < idx.size(); ++k) {
      const int ia = idx[(k + idx.size() - 1) % idx.size()];
      const int ib = idx[k];
      const int ic = idx[(k + 1) % idx.size()];
      const Point2 a = geom.ring[ia], b = geom.ring[ib], c = geom.ring[ic];
      if (tri_signed_area(a, b, c) <= area_tol) continue;  // reflex or degenerate corner
      bool ear = true;
      for (int other : idx) {
        if (other == ia || other == ib || other == ic) continue;
        if (inside_tri(geom.ring[other], a, b, c)) {
          ear = false;
          break;
        }
      }
      if (ear) {
        tris.push_back({ia, ib, ic});
        idx.erase(idx.begin() + static_cast<long>(k));
        clipped = true;
        break;
      }
    }
    if (!clipped) throw QuadratureError("ear clipping failed: polygon is degenerate");
  }
  tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

}  // namespace

std::vector<std::array<int, 3>> triangulate(const ElementGeometry& geom) {
  // Centroid fan, valid when the centroid sees every edge with positive area.
  // The fan triangle (centroid, v_k, v_{k+1}) is encoded as {-1, k, k+1}.
  const int n = geom.n_edges();
  const double area_tol = 1e-14 * geom.diameter * geom.diameter;
  bool fan_ok = true;
  for (int k = 0; k < n; ++k) {
    if (tri_signed_area(geom.centroid, geom.ring[k], geom.ring[(k + 1) % n]) <= area_tol) {
      fan_ok = false;
      break;
    }
  }
  if (fan_ok) {
    std::vector<std::array<int, 3>> tris(n);
    for (int k = 0; k < n; ++k) tris[k] = {-1, k, (k + 1) % n};
    return tris;
  }
  return ear_clip(geom);
}

Eigen::Matrix3d polygon_monomial_moments(const ElementGeometry& geom, int max_degree) {
  if (max_degree != 1)
    throw ParameterError("polygon_monomial_moments: only max_degree = 1 is provisioned");
  Eigen::Matrix3d H = Eigen::Matrix3d::Zero();
  const TriangleRule rule = TriangleRule::degree2();
  for (const auto& tri : triangulate(geom)) {
    const Point2 a = tri[0] < 0 ? geom.centroid : geom.ring[tri[0]];
    const Point2 b = geom.ring[tri[1]];
    const Point2 c = geom.ring[tri[2]];
    const double area = tri_signed_area(a, b, c);
    for (int q = 0; q < 3; ++q) {
      const auto& bary = rule.points[q];
      const Point2 p = bary[0] * a + bary[1] * b + bary[2] * c;
      const double m2 = (p.x - geom.centroid.x) / geom.diameter;
      const double m3 = (p.y - geom.centroid.y) / geom.diameter;
      const double w = rule.weights[q] * area;
      const double m[3] = {1.0, m2, m3};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) H(i, j) += w * m[i] * m[j];
    }
  }
  return H;
}

double integrate(const ElementGeometry& geom, const std::function<double(Point2)>& f) {
  double sum = 0.0;
  const TriangleRule rule = TriangleRule::degree2();
  for (const auto& tri : triangulate(geom)) {
    const Point2 a = tri[0] < 0 ? geom.centroid : geom.ring[tri[0]];
    const Point2 b = geom.ring[tri[1]];
    const Point2 c = geom.ring[tri[2]];
    const double area = tri_signed_area(a, b, c);
    for (int q = 0; q < 3; ++q) {
      const auto& bary = rule.points[q];
      const Point2 p = bary[0] * a + bary[1] * b + bary[2] * c;
      sum += rule.weights[q] * area * f(p);
    }
  }
  return sum;
}

void for_each_quad_point(const ElementGeometry& geom,
                         const std::function<void(Point2, double)>& fn) {
  const TriangleRule rule = TriangleRule::degree2();
  for (const auto& tri : triangulate(geom)) {
    const Point2 a = tri[0] < 0 ? geom.centroid : geom.ring[tri[0]];
    const Point2 b = geom.ring[tri[1]];
    const Point2 c = geom.ring[tri[2]];
    const double area = tri_signed_area(a, b, c);
    for (int q = 0; q < 3; ++q) {
      const auto& bary = rule.points[q];
      const Point2 p = bary[0] * a + bary[1] * b + bary[2] * c;
      fn(p, rule.weights[q] * area);
    }
  }
}

double edge_average(Point2 a, Point2 b, const std::function<double(Point2)>& poly) {
  // 2-point Gauss on the segment, exact through degree 3 (we need 2).
  const double g = 1.0 / std::sqrt(3.0);
  const Point2 mid = 0.5 * (a + b);
  const Point2 half = 0.5 * (b - a);
  return 0.5 * (poly(mid - g * half) + poly(mid + g * half));
}

}  // namespace vemac
