#include "vemac/vem_local.hpp"

#include <cmath>

#include "vemac/errors.hpp"
#include "vemac/quadrature.hpp"

namespace vemac {

Eigen::MatrixXd dof_matrix(const ElementGeometry& geom) {
  const int n = geom.n_edges();
  const ScaledMonomials mono{geom.centroid, geom.diameter};
  Eigen::MatrixXd D(n, 3);
  for (int e = 0; e < n; ++e)
    for (int a = 0; a < 3; ++a) D(e, a) = mono.eval(a, geom.edge_midpoint[e]);
  return D;
}

Eigen::MatrixXd pi_nabla(const ElementGeometry& geom, const Eigen::MatrixXd& D) {
  const int n = geom.n_edges();
  const double h = geom.diameter;

  double perim = 0.0;
  for (int e = 0; e < n; ++e) perim += geom.edge_length[e];

  // Gt s = Bt chi. Row 0 matches boundary means, rows 1-2 match gradients.
  Eigen::Matrix3d Gt = Eigen::Matrix3d::Zero();
  Eigen::MatrixXd Bt = Eigen::MatrixXd::Zero(3, n);
  for (int a = 0; a < 3; ++a) {
    double bmean = 0.0;
    for (int e = 0; e < n; ++e) bmean += geom.edge_length[e] * D(e, a);
    Gt(0, a) = bmean / perim;
  }
  Gt(1, 1) = Gt(2, 2) = geom.area / (h * h);
  for (int e = 0; e < n; ++e) {
    Bt(0, e) = geom.edge_length[e] / perim;
    // d m2/dn = n_x/h and d m3/dn = n_y/h, constant along each edge, so the
    // boundary integral against the edge-average DOF is exact.
    Bt(1, e) = geom.edge_normal[e].x * geom.edge_length[e] / h;
    Bt(2, e) = geom.edge_normal[e].y * geom.edge_length[e] / h;
  }

  Eigen::FullPivLU<Eigen::Matrix3d> lu(Gt);
  if (!lu.isInvertible())
    throw GeometryError("pi_nabla: singular projector system (degenerate cell)");
  return lu.solve(Bt);
}

const Eigen::MatrixXd& pi_zero(const LocalVem& local) { return local.PiStar; }

namespace {

Eigen::MatrixXd stabilization_remainder(const LocalVem& local) {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(local.n_dofs, local.n_dofs);
  return I - local.D * local.PiStar;
}

}  // namespace

Eigen::MatrixXd local_stiffness(const ElementGeometry& /*geom*/, const LocalVem& local, double c,
                                double rho, double sigma_E) {
  if (sigma_E < 0.0) throw ParameterError("local_stiffness: sigma_E must be >= 0");
  if (!(rho > 0.0)) throw ParameterError("local_stiffness: rho must be positive");
  const Eigen::MatrixXd R = stabilization_remainder(local);
  return (c * c / rho) * local.PiStar.transpose() * local.G * local.PiStar +
         sigma_E * R.transpose() * R;
}

Eigen::MatrixXd local_mass(const ElementGeometry& /*geom*/, const LocalVem& local, double rho,
                           double tau_E) {
  if (tau_E < 0.0) throw ParameterError("local_mass: tau_E must be >= 0");
  if (!(rho > 0.0)) throw ParameterError("local_mass: rho must be positive");
  const Eigen::MatrixXd R = stabilization_remainder(local);
  return (1.0 / rho) * local.PiStar.transpose() * local.H * local.PiStar +
         tau_E * local.h * local.h * R.transpose() * R;
}

LocalVem build_local_vem(const ElementGeometry& geom, double c, double rho,
                         const StabilizationParams& stab) {
  LocalVem local;
  local.n_dofs = geom.n_edges();
  local.h = geom.diameter;
  local.area = geom.area;
  local.D = dof_matrix(geom);
  local.PiStar = pi_nabla(geom, local.D);
  local.G = Eigen::Matrix3d::Zero();
  local.G(1, 1) = local.G(2, 2) = geom.area / (geom.diameter * geom.diameter);
  local.H = polygon_monomial_moments(geom, 1);
  local.K = local_stiffness(geom, local, c, rho, stab.sigma);
  local.M = local_mass(geom, local, rho, stab.tau);
  return local;
}

}  // namespace vemac
