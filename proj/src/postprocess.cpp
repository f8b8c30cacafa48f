#include "vemac/postprocess.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "vemac/errors.hpp"

namespace vemac {

namespace {

// Fixed-width shortest-roundtrip formatting keeps exports byte-deterministic.
std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double rho_of(const std::vector<double>& rho, int cell) {
  if (rho.size() == 1) return rho[0];
  return rho[static_cast<size_t>(cell)];
}

}  // namespace

double FieldOnMesh::eval_pressure(const PolyMesh& mesh, int c, Point2 p) const {
  if (kind != Kind::pressure) throw ParameterError("eval_pressure on a non-pressure field");
  const ElementGeometry g = element_geometry(mesh, c);
  const double m2 = (p.x - g.centroid.x) / g.diameter;
  const double m3 = (p.y - g.centroid.y) / g.diameter;
  return coefficients(c, 0) + coefficients(c, 1) * m2 + coefficients(c, 2) * m3;
}

FieldOnMesh reconstruct_pressure(const PolyMesh& mesh, const std::vector<LocalVem>& local_vems,
                                 const Eigen::VectorXd& eigvec) {
  const int nc = mesh.n_cells();
  if (static_cast<int>(local_vems.size()) != nc)
    throw ParameterError("reconstruct_pressure: one LocalVem per cell required");
  FieldOnMesh field;
  field.kind = FieldOnMesh::Kind::pressure;
  field.name = "pressure";
  field.coefficients.resize(nc, 3);
  field.cell_h.resize(nc);
  for (int c = 0; c < nc; ++c) {
    const auto& dofs = mesh.cell_edges[c];
    Eigen::VectorXd chi(dofs.size());
    for (size_t k = 0; k < dofs.size(); ++k) chi[k] = eigvec[dofs[k]];
    field.coefficients.row(c) = (local_vems[c].PiStar * chi).transpose();
    field.cell_h[c] = local_vems[c].h;
  }
  return field;
}

FieldOnMesh recover_displacement(const FieldOnMesh& field, double lambda_h,
                                 const std::vector<double>& rho, double tol_zero) {
  if (field.kind != FieldOnMesh::Kind::pressure)
    throw ParameterError("recover_displacement expects a pressure field");
  if (!(std::abs(lambda_h) > tol_zero))
    throw ModeError("recover_displacement: eigenvalue is numerically zero (constant mode)");
  const int nc = static_cast<int>(field.coefficients.rows());
  if (rho.size() != 1 && static_cast<int>(rho.size()) != nc)
    throw ParameterError("recover_displacement: rho must have 1 or n_cells entries");

  FieldOnMesh u;
  u.kind = FieldOnMesh::Kind::displacement;
  u.name = "displacement";
  u.lambda = lambda_h;
  u.coefficients.resize(nc, 2);
  for (int c = 0; c < nc; ++c) {
    const double scale = 1.0 / (rho_of(rho, c) * lambda_h * field.cell_h[c]);
    u.coefficients(c, 0) = field.coefficients(c, 1) * scale;
    u.coefficients(c, 1) = field.coefficients(c, 2) * scale;
  }
  return u;
}

void export_vtk(const PolyMesh& mesh, const std::vector<FieldOnMesh>& fields,
                const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary mode: no platform newline mangling
  if (!out) throw IoError("export_vtk: cannot open " + path);

  out << "# vtk DataFile Version 3.0\n";
  out << "piecewise fields\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.n_vertices() << " double\n";
  for (const auto& v : mesh.vertices) out << num(v.x) << " " << num(v.y) << " 0\n";

  size_t list_len = 0;
  for (const auto& cell : mesh.cells) list_len += cell.size() + 1;
  out << "CELLS " << mesh.n_cells() << " " << list_len << "\n";
  for (const auto& cell : mesh.cells) {
    out << cell.size();
    for (int v : cell) out << " " << v;
    out << "\n";
  }
  out << "CELL_TYPES " << mesh.n_cells() << "\n";
  for (int c = 0; c < mesh.n_cells(); ++c) out << "7\n";  // VTK_POLYGON

  if (!fields.empty()) {
    out << "CELL_DATA " << mesh.n_cells() << "\n";
    for (size_t f = 0; f < fields.size(); ++f) {
      const auto& field = fields[f];
      if (static_cast<int>(field.coefficients.rows()) != mesh.n_cells())
        throw ParameterError("export_vtk: field size does not match the mesh");
      const std::string name =
          !field.name.empty() ? field.name : "field_" + std::to_string(f);
      if (field.kind == FieldOnMesh::Kind::pressure) {
        out << "SCALARS " << name << " double 1\n";
        out << "LOOKUP_TABLE default\n";
        // Value at the cell centroid, where the scaled monomials vanish.
        for (int c = 0; c < mesh.n_cells(); ++c) out << num(field.coefficients(c, 0)) << "\n";
      } else {
        out << "VECTORS " << name << " double\n";
        for (int c = 0; c < mesh.n_cells(); ++c)
          out << num(field.coefficients(c, 0)) << " " << num(field.coefficients(c, 1)) << " 0\n";
      }
    }
  }
  out.flush();
  if (!out) throw IoError("export_vtk: write failed for " + path);
}

void export_field_csv(const FieldOnMesh& field, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("export_field_csv: cannot open " + path);
  const int nc = static_cast<int>(field.coefficients.rows());
  if (field.kind == FieldOnMesh::Kind::pressure) {
    out << "cell,c_const,c_x,c_y,h\n";
    for (int c = 0; c < nc; ++c)
      out << c << "," << num(field.coefficients(c, 0)) << "," << num(field.coefficients(c, 1))
          << "," << num(field.coefficients(c, 2)) << "," << num(field.cell_h[c]) << "\n";
  } else {
    out << "cell,u_x,u_y\n";
    for (int c = 0; c < nc; ++c)
      out << c << "," << num(field.coefficients(c, 0)) << "," << num(field.coefficients(c, 1))
          << "\n";
  }
  out.flush();
  if (!out) throw IoError("export_field_csv: write failed for " + path);
}

}  // namespace vemac
