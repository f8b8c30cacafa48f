#include "vemac/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include "vemac/errors.hpp"

namespace vemac {

PolyMesh build_edges(std::vector<Point2> vertices, std::vector<std::vector<int>> cells) {
  PolyMesh mesh;
  mesh.vertices = std::move(vertices);
  mesh.cells = std::move(cells);

  const int nv = mesh.n_vertices();
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& ring = mesh.cells[c];
    if (ring.size() < 3)
      throw FormatError("cell " + std::to_string(c) + " has fewer than 3 vertices");
    for (size_t k = 0; k < ring.size(); ++k) {
      if (ring[k] < 0 || ring[k] >= nv)
        throw FormatError("cell " + std::to_string(c) + " references invalid vertex " +
                          std::to_string(ring[k]));
      if (ring[k] == ring[(k + 1) % ring.size()])
        throw FormatError("cell " + std::to_string(c) + " repeats vertex " +
                          std::to_string(ring[k]) + " on consecutive corners");
    }
  }

  // Edges keyed by the unordered vertex pair so both adjacent cells agree on
  // identity. std::map keeps edge numbering deterministic.
  std::map<std::pair<int, int>, int> edge_of;
  mesh.cell_edges.resize(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& ring = mesh.cells[c];
    const int n = static_cast<int>(ring.size());
    mesh.cell_edges[c].resize(n);
    for (int k = 0; k < n; ++k) {
      int a = ring[k], b = ring[(k + 1) % n];
      std::pair<int, int> key{std::min(a, b), std::max(a, b)};
      auto it = edge_of.find(key);
      if (it == edge_of.end()) {
        Edge e;
        e.v0 = key.first;
        e.v1 = key.second;
        e.cell0 = c;
        it = edge_of.emplace(key, mesh.n_edges()).first;
        mesh.edges.push_back(e);
      } else {
        Edge& e = mesh.edges[it->second];
        if (e.cell1 != -1)
          throw TopologyError("edge (" + std::to_string(key.first) + "," +
                              std::to_string(key.second) + ") shared by more than two cells");
        if (e.cell0 == c)
          throw TopologyError("cell " + std::to_string(c) + " traverses edge (" +
                              std::to_string(key.first) + "," + std::to_string(key.second) +
                              ") twice");
        e.cell1 = c;
      }
      mesh.cell_edges[c][k] = it->second;
    }
  }
  for (Edge& e : mesh.edges) e.boundary = (e.cell1 == -1);
  return mesh;
}

ElementGeometry element_geometry(const PolyMesh& mesh, int cell) {
  if (cell < 0 || cell >= mesh.n_cells())
    throw FormatError("invalid cell index " + std::to_string(cell));
  const auto& ring_idx = mesh.cells[cell];
  const int n = static_cast<int>(ring_idx.size());

  ElementGeometry g;
  g.ring.resize(n);
  for (int k = 0; k < n; ++k) g.ring[k] = mesh.vertices[ring_idx[k]];

  // Shoelace area and area-weighted centroid.
  double twice_area = 0.0, cx = 0.0, cy = 0.0;
  for (int k = 0; k < n; ++k) {
    const Point2& a = g.ring[k];
    const Point2& b = g.ring[(k + 1) % n];
    const double w = cross(a, b);
    twice_area += w;
    cx += (a.x + b.x) * w;
    cy += (a.y + b.y) * w;
  }
  g.area = 0.5 * twice_area;
  if (!(g.area > 0.0))
    throw GeometryError("cell " + std::to_string(cell) +
                        " has non-positive area (wrong orientation or degenerate)");
  g.centroid = {cx / (3.0 * twice_area), cy / (3.0 * twice_area)};

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.diameter = std::max(g.diameter, dist(g.ring[i], g.ring[j]));

  g.edge_length.resize(n);
  g.edge_normal.resize(n);
  g.edge_midpoint.resize(n);
  for (int k = 0; k < n; ++k) {
    const Point2& a = g.ring[k];
    const Point2& b = g.ring[(k + 1) % n];
    const Point2 t = b - a;
    const double len = norm(t);
    if (!(len > 0.0))
      throw GeometryError("cell " + std::to_string(cell) + " has a zero-length edge");
    g.edge_length[k] = len;
    // CCW ring: the outward normal is the tangent rotated -90 degrees.
    g.edge_normal[k] = {t.y / len, -t.x / len};
    g.edge_midpoint[k] = 0.5 * (a + b);
  }
  return g;
}

MeshQualityReport validate(const PolyMesh& mesh, double /*gamma*/, double c_a2) {
  MeshQualityReport report;
  report.min_vertex_ratio = std::numeric_limits<double>::infinity();
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const ElementGeometry g = element_geometry(mesh, c);
    report.h = std::max(report.h, g.diameter);

    bool a1_ok = true;
    const int n = g.n_edges();
    for (int k = 0; k < n; ++k) {
      const Point2& a = g.ring[k];
      const Point2& b = g.ring[(k + 1) % n];
      // Signed area of (centroid, a, b); must be positive for the centroid to
      // see the edge from inside.
      if (cross(a - g.centroid, b - g.centroid) <= 0.0) {
        a1_ok = false;
        break;
      }
    }
    if (!a1_ok) report.a1_failures.push_back(c);

    double dmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) dmin = std::min(dmin, dist(g.ring[i], g.ring[j]));
    report.min_vertex_ratio = std::min(report.min_vertex_ratio, dmin / g.diameter);
    if (dmin < c_a2 * g.diameter) report.a2_failures.push_back(c);
  }
  return report;
}

double mesh_size(const PolyMesh& mesh) {
  double h = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) h = std::max(h, element_geometry(mesh, c).diameter);
  return h;
}

double total_area(const PolyMesh& mesh) {
  double area = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) area += element_geometry(mesh, c).area;
  return area;
}

}  // namespace vemac
