#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vemac/mesh.hpp"
#include "vemac/vem_local.hpp"

namespace vemac {

// Piecewise-polynomial field attached to a mesh. Pressure fields store the
// three scaled-monomial coefficients of the elementwise projection, plus the
// cell diameter needed to differentiate them; displacement fields store one
// constant 2-vector per cell.
struct FieldOnMesh {
  enum class Kind { pressure, displacement };
  Kind kind = Kind::pressure;
  Eigen::MatrixXd coefficients;  // n_cells x 3 (pressure) or n_cells x 2
  Eigen::VectorXd cell_h;        // cell diameters (pressure only)
  double lambda = 0.0;
  std::string name;

  // Pressure value at a point of cell c (the projection is affine).
  double eval_pressure(const PolyMesh& mesh, int c, Point2 p) const;
};

// Elementwise projection coefficients of a DOF vector: per cell,
// PiStar * (DOF slice). The DOF layout is the mesh's edge numbering.
FieldOnMesh reconstruct_pressure(const PolyMesh& mesh, const std::vector<LocalVem>& local_vems,
                                 const Eigen::VectorXd& eigvec);

// Constant per-cell displacement grad(p_h) / (rho_E * lambda_h). `rho` is
// either one value (uniform) or one per cell. Near-zero lambda_h is the
// constant pressure mode, which has no displacement: mode error.
FieldOnMesh recover_displacement(const FieldOnMesh& field, double lambda_h,
                                 const std::vector<double>& rho, double tol_zero = 1e-8);

// Legacy ASCII VTK export with polygon cells; fields become CELL_DATA
// (scalars for pressure at centroids, vectors for displacement). Output is
// byte-deterministic for fixed inputs.
void export_vtk(const PolyMesh& mesh, const std::vector<FieldOnMesh>& fields,
                const std::string& path);

// Per-element coefficient dump, one row per cell.
void export_field_csv(const FieldOnMesh& field, const std::string& path);

}  // namespace vemac
