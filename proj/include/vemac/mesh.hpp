// Polygonal mesh container with edge connectivity, per-element geometry,
// and the A1/A2 shape-assumption checks.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vemac/geometry.hpp"

namespace vemac {

struct Edge {
  int v0 = -1;            // vertex indices, v0 < v1
  int v1 = -1;
  int cell0 = -1;         // first adjacent cell
  int cell1 = -1;         // second adjacent cell, -1 on the boundary
  bool boundary = false;
};

// Cells are CCW vertex-index cycles; edges are derived by build_edges().
struct PolyMesh {
  std::vector<Point2> vertices;
  std::vector<std::vector<int>> cells;
  std::vector<Edge> edges;
  // cell_edges[c][k] is the edge between cells[c][k] and cells[c][k+1].
  std::vector<std::vector<int>> cell_edges;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_cells() const { return static_cast<int>(cells.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }
};

struct ElementGeometry {
  double area = 0.0;         // |E|
  Point2 centroid;           // x_E
  double diameter = 0.0;     // h_E, max pairwise vertex distance
  std::vector<Point2> ring;  // vertex ring, CCW
  std::vector<double> edge_length;
  std::vector<Point2> edge_normal;    // outward unit normals
  std::vector<Point2> edge_midpoint;

  int n_edges() const { return static_cast<int>(ring.size()); }
};

struct MeshQualityReport {
  double h = 0.0;                    // max element diameter
  double min_vertex_ratio = 0.0;     // min over cells of (closest vertex pair)/h_E
  std::vector<int> a1_failures;      // cells whose centroid does not see every edge
  std::vector<int> a2_failures;      // cells with vertex pairs closer than c_a2*h_E
  bool pass() const { return a1_failures.empty() && a2_failures.empty(); }
};

// Builds edge connectivity and checks basic validity: cells with >=3 distinct
// vertices, valid indices, every edge shared by at most two cells.
PolyMesh build_edges(std::vector<Point2> vertices, std::vector<std::vector<int>> cells);

// Shoelace area, area-weighted centroid, max-pairwise-distance diameter,
// per-edge lengths/outward normals/midpoints. Throws GeometryError on
// non-positive area.
ElementGeometry element_geometry(const PolyMesh& mesh, int cell);

// Report-only quality checks. A1 proxy: the centroid sees every boundary edge
// of the cell with positive signed area (star-shapedness w.r.t. the centroid).
// A2: min vertex distance within a cell >= c_a2 * h_E.
MeshQualityReport validate(const PolyMesh& mesh, double gamma = 0.0, double c_a2 = 1e-10);

// Max element diameter (the mesh size used for convergence tables).
double mesh_size(const PolyMesh& mesh);

// Sum of cell areas.
double total_area(const PolyMesh& mesh);

}  // namespace vemac
