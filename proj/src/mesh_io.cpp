#include "vemac/mesh_io.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "vemac/errors.hpp"

namespace vemac {

PolyMesh load_mesh_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("mesh file " + path + " is not valid JSON: " + e.what());
  }
  if (!j.is_object() || !j.contains("vertices") || !j.contains("cells"))
    throw FormatError("mesh file " + path + " must contain 'vertices' and 'cells'");

  std::vector<Point2> vertices;
  for (const auto& v : j["vertices"]) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw FormatError("mesh file " + path + ": vertices must be [x, y] pairs");
    const double x = v[0].get<double>(), y = v[1].get<double>();
    if (!std::isfinite(x) || !std::isfinite(y))
      throw FormatError("mesh file " + path + ": non-finite vertex coordinate");
    vertices.push_back({x, y});
  }
  std::vector<std::vector<int>> cells;
  for (const auto& c : j["cells"]) {
    if (!c.is_array()) throw FormatError("mesh file " + path + ": cells must be index arrays");
    std::vector<int> ring;
    for (const auto& idx : c) {
      if (!idx.is_number_integer())
        throw FormatError("mesh file " + path + ": cell indices must be integers");
      ring.push_back(idx.get<int>());
    }
    cells.push_back(std::move(ring));
  }
  return build_edges(std::move(vertices), std::move(cells));
}

void save_mesh_json(const PolyMesh& mesh, const std::string& path) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const Point2& v : mesh.vertices) j["vertices"].push_back({v.x, v.y});
  j["cells"] = nlohmann::json::array();
  for (const auto& c : mesh.cells) j["cells"].push_back(c);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write mesh file: " + path);
  out << j.dump(1) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace vemac
