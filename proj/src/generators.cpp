#include "vemac/generators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <utility>

#include "vemac/errors.hpp"

namespace vemac {

namespace {

// mt19937_64 has a standardized sequence; mapping to doubles by hand keeps
// the streams identical across standard libraries.
struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uniform() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }  // [0,1)
  double symmetric() { return 2.0 * uniform() - 1.0; }                       // [-1,1)
};

double poly_area(const std::vector<Point2>& p) {
  double twice = 0.0;
  for (size_t k = 0; k < p.size(); ++k) twice += cross(p[k], p[(k + 1) % p.size()]);
  return 0.5 * twice;
}

Point2 poly_centroid(const std::vector<Point2>& p) {
  double twice = 0.0, cx = 0.0, cy = 0.0;
  for (size_t k = 0; k < p.size(); ++k) {
    const Point2& a = p[k];
    const Point2& b = p[(k + 1) % p.size()];
    const double w = cross(a, b);
    twice += w;
    cx += (a.x + b.x) * w;
    cy += (a.y + b.y) * w;
  }
  return {cx / (3.0 * twice), cy / (3.0 * twice)};
}

bool point_in_polygon(const std::vector<Point2>& poly, Point2 q) {
  // Ray casting; boundary hits are measure-zero for our jittered samples.
  bool inside = false;
  for (size_t k = 0; k < poly.size(); ++k) {
    const Point2& a = poly[k];
    const Point2& b = poly[(k + 1) % poly.size()];
    if ((a.y > q.y) != (b.y > q.y)) {
      const double x_cross = a.x + (q.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (q.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

// Sutherland-Hodgman against one half-plane {x : dot(x - p0, nrm) <= 0}.
std::vector<Point2> clip_halfplane(const std::vector<Point2>& poly, Point2 p0, Point2 nrm) {
  std::vector<Point2> out;
  out.reserve(poly.size() + 2);
  const size_t n = poly.size();
  for (size_t k = 0; k < n; ++k) {
    const Point2& a = poly[k];
    const Point2& b = poly[(k + 1) % n];
    const double fa = dot(a - p0, nrm);
    const double fb = dot(b - p0, nrm);
    if (fa <= 0.0) out.push_back(a);
    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb <= 0.0)) {
      const double t = fa / (fa - fb);
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

struct LloydSetup {
  std::vector<Point2> polygon;  // domain ring (CCW); for periodic: the base slab bounds
  double period = 0.0;          // period in x, 0 = not periodic
  double y0 = 0.0, y1 = 0.0;    // slab bounds when periodic
};

std::vector<Point2> jittered_seeds(const LloydSetup& dom, int n, Rng& rng) {
  double x0, x1, y0, y1, area;
  if (dom.period > 0.0) {
    x0 = 0.0;
    x1 = dom.period;
    y0 = dom.y0;
    y1 = dom.y1;
    area = dom.period * (y1 - y0);
  } else {
    x0 = y0 = std::numeric_limits<double>::infinity();
    x1 = y1 = -std::numeric_limits<double>::infinity();
    for (const Point2& p : dom.polygon) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
    area = poly_area(dom.polygon);
  }
  const double g = std::sqrt(area / n);
  const int nx = std::max(1, static_cast<int>(std::llround((x1 - x0) / g)));
  const int ny = std::max(1, static_cast<int>(std::llround((y1 - y0) / g)));

  std::vector<Point2> seeds;
  seeds.reserve(n);
  for (int pass = 0; pass < 200 && static_cast<int>(seeds.size()) < n; ++pass) {
    for (int j = 0; j < ny && static_cast<int>(seeds.size()) < n; ++j) {
      for (int i = 0; i < nx && static_cast<int>(seeds.size()) < n; ++i) {
        Point2 p{x0 + (i + 0.5 + 0.35 * rng.symmetric()) * (x1 - x0) / nx,
                 y0 + (j + 0.5 + 0.35 * rng.symmetric()) * (y1 - y0) / ny};
        if (dom.period > 0.0) {
          if (p.x < 0.0) p.x += dom.period;
          if (p.x >= dom.period) p.x -= dom.period;
          if (p.y <= y0 || p.y >= y1) continue;
          seeds.push_back(p);
        } else if (point_in_polygon(dom.polygon, p)) {
          seeds.push_back(p);
        }
      }
    }
  }
  if (static_cast<int>(seeds.size()) < n)
    throw GenerationError("could not place " + std::to_string(n) + " seeds in the domain");
  return seeds;
}

// Voronoi cell of seed i clipped to the domain. Neighbors are processed in
// ascending distance; a bisector at distance d/2 beyond every current cell
// vertex cannot cut, which bounds how many neighbors matter.
std::vector<Point2> voronoi_cell(const LloydSetup& dom, const std::vector<Point2>& seeds, int i) {
  const Point2 si = seeds[i];
  std::vector<Point2> poly;
  if (dom.period > 0.0) {
    poly = {{si.x - 0.5 * dom.period, dom.y0},
            {si.x + 0.5 * dom.period, dom.y0},
            {si.x + 0.5 * dom.period, dom.y1},
            {si.x - 0.5 * dom.period, dom.y1}};
  } else {
    poly = dom.polygon;
  }

  std::vector<std::pair<double, Point2>> cand;  // (distance^2, neighbor position)
  cand.reserve(seeds.size() + 2);
  for (size_t j = 0; j < seeds.size(); ++j) {
    if (static_cast<int>(j) == i) continue;
    Point2 sj = seeds[j];
    if (dom.period > 0.0) {
      // Use the wraparound copy closest to s_i.
      double dx = sj.x - si.x;
      if (dx > 0.5 * dom.period) sj.x -= dom.period;
      if (dx < -0.5 * dom.period) sj.x += dom.period;
    }
    const Point2 d = sj - si;
    cand.emplace_back(dot(d, d), sj);
  }
  if (dom.period > 0.0) {
    // The seed's own periodic images bound the cell within one period.
    for (double shift : {-dom.period, dom.period}) {
      Point2 img{si.x + shift, si.y};
      const Point2 d = img - si;
      cand.emplace_back(dot(d, d), img);
    }
  }
  auto lt = [](const std::pair<double, Point2>& a, const std::pair<double, Point2>& b) {
    if (a.first != b.first) return a.first < b.first;
    if (a.second.x != b.second.x) return a.second.x < b.second.x;
    return a.second.y < b.second.y;
  };

  // Usually only the nearest ~10 neighbors touch the cell; sort a prefix and
  // fall back to a full sort in the rare case it is consumed.
  size_t sorted = std::min<size_t>(32, cand.size());
  std::partial_sort(cand.begin(), cand.begin() + sorted, cand.end(), lt);

  for (size_t k = 0; k < cand.size(); ++k) {
    if (k == sorted && sorted < cand.size()) {
      std::sort(cand.begin() + sorted, cand.end(), lt);
      sorted = cand.size();
    }
    double max_d2 = 0.0;
    for (const Point2& v : poly) {
      const Point2 d = v - si;
      max_d2 = std::max(max_d2, dot(d, d));
    }
    if (cand[k].first > 4.0 * max_d2) break;
    if (cand[k].first < 1e-24)
      throw GenerationError("duplicate Voronoi seeds near seed " + std::to_string(i));
    const Point2 sj = cand[k].second;
    poly = clip_halfplane(poly, 0.5 * (si + sj), sj - si);
    if (poly.size() < 3)
      throw GenerationError("Voronoi cell of seed " + std::to_string(i) + " degenerated");
  }
  return poly;
}

std::vector<std::vector<Point2>> lloyd_cells(const LloydSetup& dom, int n_seeds, int n_iters,
                                             std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Point2> seeds = jittered_seeds(dom, n_seeds, rng);
  for (int it = 0; it < n_iters; ++it) {
    std::vector<Point2> next = seeds;
    for (int i = 0; i < n_seeds; ++i) {
      Point2 c = poly_centroid(voronoi_cell(dom, seeds, i));
      if (dom.period > 0.0) {
        while (c.x < 0.0) c.x += dom.period;
        while (c.x >= dom.period) c.x -= dom.period;
        next[i] = c;
      } else if (point_in_polygon(dom.polygon, c)) {
        next[i] = c;
      }
      // Non-convex domains can push a centroid outside; keep the old seed then.
    }
    seeds = std::move(next);
  }
  std::vector<std::vector<Point2>> cells(n_seeds);
  for (int i = 0; i < n_seeds; ++i) cells[i] = voronoi_cell(dom, seeds, i);
  return cells;
}

// Merge coincident vertices across cells (union-find over a spatial hash),
// then insert vertices that sit on the interior of another cell's edge so
// neighboring rings agree edge-by-edge.
PolyMesh weld_polygons(const std::vector<std::vector<Point2>>& polys, double tol) {
  std::vector<Point2> pts;
  std::vector<std::vector<int>> rings(polys.size());
  for (size_t c = 0; c < polys.size(); ++c) {
    for (const Point2& p : polys[c]) {
      rings[c].push_back(static_cast<int>(pts.size()));
      pts.push_back(p);
    }
  }
  const int np = static_cast<int>(pts.size());

  std::vector<int> parent(np);
  for (int i = 0; i < np; ++i) parent[i] = i;
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);  // smallest index is canonical
  };

  std::map<std::pair<long long, long long>, std::vector<int>> hash;
  auto key_of = [&](Point2 p) {
    return std::pair<long long, long long>{static_cast<long long>(std::floor(p.x / tol)),
                                           static_cast<long long>(std::floor(p.y / tol))};
  };
  for (int i = 0; i < np; ++i) {
    const auto [kx, ky] = key_of(pts[i]);
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = hash.find({kx + dx, ky + dy});
        if (it == hash.end()) continue;
        for (int j : it->second)
          if (dist(pts[i], pts[j]) <= tol) unite(i, j);
      }
    hash[{kx, ky}].push_back(i);
  }

  // Renumber cluster roots in order of first occurrence.
  std::vector<int> id_of(np, -1);
  std::vector<Point2> verts;
  for (int i = 0; i < np; ++i) {
    const int r = find(i);
    if (id_of[r] < 0) {
      id_of[r] = static_cast<int>(verts.size());
      verts.push_back(pts[r]);
    }
    id_of[i] = id_of[r];
  }
  for (auto& ring : rings) {
    for (int& v : ring) v = id_of[v];
    std::vector<int> dedup;
    for (int v : ring)
      if (dedup.empty() || dedup.back() != v) dedup.push_back(v);
    while (dedup.size() > 1 && dedup.front() == dedup.back()) dedup.pop_back();
    ring = std::move(dedup);
  }

  // T-junction pass: a vertex of one cell may lie on the interior of another
  // cell's edge (near-degenerate Voronoi configurations); insert it there.
  double mean_edge = 0.0;
  int n_edges_est = 0;
  for (const auto& ring : rings)
    for (size_t k = 0; k < ring.size(); ++k) {
      mean_edge += dist(verts[ring[k]], verts[ring[(k + 1) % ring.size()]]);
      ++n_edges_est;
    }
  mean_edge /= std::max(1, n_edges_est);
  const double bucket = std::max(mean_edge, 10.0 * tol);
  std::map<std::pair<long long, long long>, std::vector<int>> vert_hash;
  for (size_t i = 0; i < verts.size(); ++i)
    vert_hash[{static_cast<long long>(std::floor(verts[i].x / bucket)),
               static_cast<long long>(std::floor(verts[i].y / bucket))}]
        .push_back(static_cast<int>(i));

  for (auto& ring : rings) {
    std::vector<int> out;
    const size_t n = ring.size();
    for (size_t k = 0; k < n; ++k) {
      const int a = ring[k], b = ring[(k + 1) % n];
      out.push_back(a);
      const Point2 pa = verts[a], pb = verts[b];
      const double len = dist(pa, pb);
      if (len <= 2.0 * tol) continue;
      std::vector<std::pair<double, int>> on_edge;
      const long long bx0 = static_cast<long long>(std::floor((std::min(pa.x, pb.x) - tol) / bucket));
      const long long bx1 = static_cast<long long>(std::floor((std::max(pa.x, pb.x) + tol) / bucket));
      const long long by0 = static_cast<long long>(std::floor((std::min(pa.y, pb.y) - tol) / bucket));
      const long long by1 = static_cast<long long>(std::floor((std::max(pa.y, pb.y) + tol) / bucket));
      for (long long bx = bx0; bx <= bx1; ++bx)
        for (long long by = by0; by <= by1; ++by) {
          auto it = vert_hash.find({bx, by});
          if (it == vert_hash.end()) continue;
          for (int w : it->second) {
            if (w == a || w == b) continue;
            const Point2 d = pb - pa;
            const double t = dot(verts[w] - pa, d) / dot(d, d);
            if (t * len < tol || (1.0 - t) * len < tol) continue;
            const Point2 foot = pa + t * d;
            if (dist(foot, verts[w]) <= tol) on_edge.emplace_back(t, w);
          }
        }
      std::sort(on_edge.begin(), on_edge.end());
      for (const auto& [t, w] : on_edge)
        if (out.back() != w) out.push_back(w);
    }
    std::vector<int> dedup;
    for (int v : out)
      if (dedup.empty() || dedup.back() != v) dedup.push_back(v);
    while (dedup.size() > 1 && dedup.front() == dedup.back()) dedup.pop_back();
    ring = std::move(dedup);
  }

  for (size_t c = 0; c < rings.size(); ++c) {
    if (rings[c].size() < 3)
      throw GenerationError("welded cell " + std::to_string(c) + " has fewer than 3 vertices");
    std::set<int> uniq(rings[c].begin(), rings[c].end());
    if (uniq.size() != rings[c].size())
      throw GenerationError("welded cell " + std::to_string(c) + " is self-touching");
  }

  // Drop vertices that no ring references (weld leftovers), keeping order.
  std::vector<int> remap(verts.size(), -1);
  std::vector<Point2> used;
  for (const auto& ring : rings)
    for (int v : ring)
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(used.size());
        used.push_back(verts[v]);
      }
  for (auto& ring : rings)
    for (int& v : ring) v = remap[v];

  return build_edges(std::move(used), std::move(rings));
}

}  // namespace

MeshFamily parse_family(const std::string& name) {
  if (name == "quads") return MeshFamily::quads;
  if (name == "distorted") return MeshFamily::distorted;
  if (name == "voronoi") return MeshFamily::voronoi;
  if (name == "triangles") return MeshFamily::triangles;
  throw FormatError("unknown mesh family '" + name + "'");
}

std::string family_name(MeshFamily f) {
  switch (f) {
    case MeshFamily::quads: return "quads";
    case MeshFamily::distorted: return "distorted";
    case MeshFamily::voronoi: return "voronoi";
    case MeshFamily::triangles: return "triangles";
  }
  return "?";
}

VoronoiDomain VoronoiDomain::rectangle(double lx, double ly) {
  return {{{0.0, 0.0}, {lx, 0.0}, {lx, ly}, {0.0, ly}}, 0.0};
}

PolyMesh generate_rect_quads(int nx, int ny, double lx, double ly) {
  if (nx < 1 || ny < 1 || !(lx > 0.0) || !(ly > 0.0))
    throw ParameterError("generate_rect_quads: counts must be >= 1 and lengths positive");
  std::vector<Point2> verts;
  verts.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) verts.push_back({lx * i / nx, ly * j / ny});
  std::vector<std::vector<int>> cells;
  cells.reserve(nx * ny);
  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      cells.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
  return build_edges(std::move(verts), std::move(cells));
}

PolyMesh generate_rect_distorted(int nx, int ny, double lx, double ly, double amplitude,
                                 std::uint64_t seed) {
  if (!(amplitude >= 0.0) || amplitude >= 0.5)
    throw ParameterError("distortion amplitude must be in [0, 0.5) cell units");
  PolyMesh mesh = generate_rect_quads(nx, ny, lx, ly);
  Rng rng(seed);
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const double dx = amplitude * (lx / nx) * rng.symmetric();
      const double dy = amplitude * (ly / ny) * rng.symmetric();
      if (i > 0 && i < nx && j > 0 && j < ny) {
        Point2& v = mesh.vertices[j * (nx + 1) + i];
        v.x += dx;
        v.y += dy;
      }
    }
  return build_edges(std::move(mesh.vertices), std::move(mesh.cells));
}

PolyMesh generate_rect_triangles(int nx, int ny, double lx, double ly, double midpoint_deform,
                                 std::uint64_t seed) {
  if (!(midpoint_deform >= 0.0) || midpoint_deform >= 0.5)
    throw ParameterError("midpoint deformation must be in [0, 0.5) cell units");
  if (nx < 1 || ny < 1 || !(lx > 0.0) || !(ly > 0.0))
    throw ParameterError("generate_rect_triangles: counts must be >= 1 and lengths positive");
  std::vector<Point2> verts;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) verts.push_back({lx * i / nx, ly * j / ny});
  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  Rng rng(seed);
  std::vector<std::vector<int>> cells;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      const Point2 ctr{lx * (i + 0.5 + midpoint_deform * rng.symmetric()) / nx,
                       ly * (j + 0.5 + midpoint_deform * rng.symmetric()) / ny};
      const int m = static_cast<int>(verts.size());
      verts.push_back(ctr);
      cells.push_back({a, b, m});
      cells.push_back({b, c, m});
      cells.push_back({c, d, m});
      cells.push_back({d, a, m});
    }
  return build_edges(std::move(verts), std::move(cells));
}

PolyMesh generate_voronoi_lloyd(const VoronoiDomain& domain, int n_seeds, int n_lloyd_iters,
                                std::uint64_t seed) {
  if (domain.period_x != 0.0)
    throw ParameterError("periodic Voronoi domains are used internally by generate_ring");
  if (n_seeds < 1 || n_lloyd_iters < 0) throw ParameterError("bad Voronoi generator parameters");
  if (poly_area(domain.polygon) <= 0.0)
    throw ParameterError("Voronoi domain polygon must be CCW with positive area");
  LloydSetup dom{domain.polygon, 0.0, 0.0, 0.0};
  auto cells = lloyd_cells(dom, n_seeds, n_lloyd_iters, seed);
  const double tol = 1e-9 * std::sqrt(poly_area(domain.polygon) / n_seeds);
  return weld_polygons(cells, tol);
}

PolyMesh generate_lshape(MeshFamily family, int n, std::uint64_t seed) {
  if (n < 2 || n % 2 != 0)
    throw FormatError("generate_lshape requires an even n >= 2 (grid splits at the corner)");

  if (family == MeshFamily::voronoi) {
    VoronoiDomain dom;
    dom.polygon = {{0, -1}, {1, -1}, {1, 1}, {-1, 1}, {-1, 0}, {0, 0}};
    return generate_voronoi_lloyd(dom, 3 * n * n / 4, 10, seed);
  }

  // Grid families: build the full (-1,1)^2 grid, drop the removed quadrant.
  const double h = 2.0 / n;
  std::vector<Point2> verts;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) verts.push_back({-1.0 + h * i, -1.0 + h * j});
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::vector<int>> quads;
  std::vector<std::pair<int, int>> quad_ij;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double cx = -1.0 + h * (i + 0.5), cy = -1.0 + h * (j + 0.5);
      if (cx < 0.0 && cy < 0.0) continue;  // removed quadrant
      quads.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
      quad_ij.emplace_back(i, j);
    }

  Rng rng(seed);
  std::vector<std::vector<int>> cells;
  if (family == MeshFamily::quads || family == MeshFamily::distorted) {
    cells = quads;
    if (family == MeshFamily::distorted) {
      // Perturb only vertices interior to the L (boundary includes the notch).
      PolyMesh probe = build_edges(verts, cells);
      std::vector<bool> on_boundary(verts.size(), false);
      for (const Edge& e : probe.edges)
        if (e.boundary) on_boundary[e.v0] = on_boundary[e.v1] = true;
      std::vector<bool> used(verts.size(), false);
      for (const auto& q : cells)
        for (int v : q) used[v] = true;
      const double amplitude = 0.2;
      for (size_t v = 0; v < verts.size(); ++v) {
        const double dx = amplitude * h * rng.symmetric();
        const double dy = amplitude * h * rng.symmetric();
        if (used[v] && !on_boundary[v]) {
          verts[v].x += dx;
          verts[v].y += dy;
        }
      }
    }
  } else {  // triangles
    const double deform = 0.25;
    for (size_t q = 0; q < quads.size(); ++q) {
      const auto [i, j] = quad_ij[q];
      const Point2 ctr{-1.0 + h * (i + 0.5 + deform * rng.symmetric()),
                       -1.0 + h * (j + 0.5 + deform * rng.symmetric())};
      const int m = static_cast<int>(verts.size());
      verts.push_back(ctr);
      const int a = quads[q][0], b = quads[q][1], c = quads[q][2], d = quads[q][3];
      cells.push_back({a, b, m});
      cells.push_back({b, c, m});
      cells.push_back({c, d, m});
      cells.push_back({d, a, m});
    }
  }

  // Compact away unused grid vertices (the dropped quadrant's interior).
  std::vector<int> remap(verts.size(), -1);
  std::vector<Point2> used_verts;
  for (const auto& cell : cells)
    for (int v : cell)
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(used_verts.size());
        used_verts.push_back(verts[v]);
      }
  for (auto& cell : cells)
    for (int& v : cell) v = remap[v];
  return build_edges(std::move(used_verts), std::move(cells));
}

PolyMesh generate_ring(MeshFamily family, int n_boundary, std::uint64_t seed) {
  if (n_boundary < 8) throw ParameterError("generate_ring requires n_boundary >= 8");
  const double W = 2.0 * std::numbers::pi;
  const double t0 = std::log(kRingInnerRadius), t1 = std::log(kRingOuterRadius);
  const double Ht = t1 - t0;
  const int n_theta = std::max(6, static_cast<int>(std::llround(n_boundary / 2.0)));
  const int n_t = std::max(2, static_cast<int>(std::llround(n_theta * Ht / W)));

  auto map_pt = [&](double theta, double t) -> Point2 {
    const double r = std::exp(t);
    return {r * std::cos(theta), r * std::sin(theta)};
  };

  if (family == MeshFamily::voronoi) {
    LloydSetup dom;
    dom.period = W;
    dom.y0 = t0;
    dom.y1 = t1;
    auto cells = lloyd_cells(dom, n_theta * n_t, 10, seed);
    const double snap = 1e-9 * Ht;
    for (auto& poly : cells) {
      for (Point2& p : poly) {
        if (std::abs(p.y - t0) < snap) p.y = t0;
        if (std::abs(p.y - t1) < snap) p.y = t1;
        p = map_pt(p.x, p.y);
      }
      // The map has negative Jacobian determinant, so rings flip to CW.
      std::reverse(poly.begin(), poly.end());
    }
    const double ring_area = std::numbers::pi *
                             (kRingOuterRadius * kRingOuterRadius - kRingInnerRadius * kRingInnerRadius);
    const double tol = 1e-9 * std::sqrt(ring_area / (n_theta * n_t));
    return weld_polygons(cells, tol);
  }

  if (family == MeshFamily::triangles) {
    std::vector<Point2> verts;
    auto vid = [&](int i, int j) { return j * n_theta + (i % n_theta); };
    for (int j = 0; j <= n_t; ++j) {
      const double t = (j == n_t) ? t1 : t0 + Ht * j / n_t;
      for (int i = 0; i < n_theta; ++i) verts.push_back(map_pt(W * i / n_theta, t));
    }
    Rng rng(seed);
    const double deform = 0.25;
    std::vector<std::vector<int>> cells;
    for (int j = 0; j < n_t; ++j)
      for (int i = 0; i < n_theta; ++i) {
        // Corner order is (theta, t)-clockwise: the conformal map reverses
        // orientation, so this comes out CCW in physical coordinates.
        const int a = vid(i, j), b = vid(i, j + 1), c = vid(i + 1, j + 1), d = vid(i + 1, j);
        Point2 ctr = 0.25 * (verts[a] + verts[b] + verts[c] + verts[d]);
        double min_side = std::min(std::min(dist(verts[a], verts[b]), dist(verts[b], verts[c])),
                                   std::min(dist(verts[c], verts[d]), dist(verts[d], verts[a])));
        ctr.x += deform * min_side * rng.symmetric();
        ctr.y += deform * min_side * rng.symmetric();
        const int m = static_cast<int>(verts.size());
        verts.push_back(ctr);
        cells.push_back({a, b, m});
        cells.push_back({b, c, m});
        cells.push_back({c, d, m});
        cells.push_back({d, a, m});
      }
    return build_edges(std::move(verts), std::move(cells));
  }

  throw ParameterError("generate_ring supports the voronoi and triangles families");
}

}  // namespace vemac
