// Mesh generators for the four benchmark geometries: rectangle families
// (uniform quads, distorted quads, Lloyd-relaxed Voronoi, triangles with
// deformed midpoints), the L-shaped domain, and the circular ring.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vemac/mesh.hpp"

namespace vemac {

enum class MeshFamily { quads, distorted, voronoi, triangles };

MeshFamily parse_family(const std::string& name);
std::string family_name(MeshFamily f);

// Axis-aligned rectangle (0,lx) x (0,ly), nx-by-ny uniform quads.
PolyMesh generate_rect_quads(int nx, int ny, double lx, double ly);

// Uniform quads with interior vertices displaced by up to amplitude*(cell
// size) in each direction; boundary vertices stay put.
PolyMesh generate_rect_distorted(int nx, int ny, double lx, double ly, double amplitude,
                                 std::uint64_t seed);

// Each uniform quad split into 4 triangles around a randomly displaced
// center point (midpoint_deform in units of the cell size).
PolyMesh generate_rect_triangles(int nx, int ny, double lx, double ly, double midpoint_deform,
                                 std::uint64_t seed);

// Convex or L-shaped polygonal domain for the Voronoi generator, CCW ring.
struct VoronoiDomain {
  std::vector<Point2> polygon;
  // Optional periodicity in x: cells wrap at x = x_min and x = x_min+period.
  // Used by the ring construction; 0 disables.
  double period_x = 0.0;

  static VoronoiDomain rectangle(double lx, double ly);
};

// Centroidal Voronoi tessellation: jittered-grid seeds, n_lloyd_iters Lloyd
// relaxation sweeps (seed -> centroid of its clipped cell), final
// tessellation clipped to the domain with vertices welded across cells.
PolyMesh generate_voronoi_lloyd(const VoronoiDomain& domain, int n_seeds, int n_lloyd_iters,
                                std::uint64_t seed);

// L-shape (-1,1)^2 minus [-1,0]^2. Grid families require even n (the grid
// must split cleanly at the reentrant corner); Voronoi seeds the L directly.
PolyMesh generate_lshape(MeshFamily family, int n, std::uint64_t seed = 1);

// Ring 1/2 <= sqrt(x^2+y^2) <= 2 built in conformal coordinates
// (theta, log r): uniform cells there grade smoothly in physical space and
// both circles carry about n_boundary/2 cells each. Supports the voronoi and
// triangles families; boundary vertices land exactly on the circles.
PolyMesh generate_ring(MeshFamily family, int n_boundary, std::uint64_t seed);

constexpr double kRingInnerRadius = 0.5;
constexpr double kRingOuterRadius = 2.0;

}  // namespace vemac
