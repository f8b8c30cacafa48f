// Per-element lowest-order machinery on polygons: edge-average DOFs, the
// energy projector onto affine polynomials, and the stabilized local
// stiffness and mass matrices.
//
// DOFs are the edge averages (one per edge). Monomial basis on a cell:
// m1 = 1, m2 = (x-x_E)/h_E, m3 = (y-y_E)/h_E.
#pragma once

#include <Eigen/Dense>

#include "vemac/mesh.hpp"

namespace vemac {

struct ScaledMonomials {
  Point2 center;  // x_E
  double scale;   // h_E

  double eval(int alpha, Point2 p) const {
    switch (alpha) {
      case 0: return 1.0;
      case 1: return (p.x - center.x) / scale;
      default: return (p.y - center.y) / scale;
    }
  }
};

struct StabilizationParams {
  double sigma = 1.0;  // stiffness stabilization weight
  double tau = 1.0;    // mass stabilization weight (times h_E^2)
};

struct LocalVem {
  int n_dofs = 0;           // = number of edges of the cell
  Eigen::MatrixXd D;        // n_dofs x 3, DOFs of each monomial
  Eigen::MatrixXd PiStar;   // 3 x n_dofs, monomial coefficients of the projection
  Eigen::Matrix3d G;        // gradient Gram matrix of the monomials
  Eigen::Matrix3d H;        // moment matrix of the monomials
  Eigen::MatrixXd K;        // local stiffness
  Eigen::MatrixXd M;        // local mass
  double h = 0.0;           // h_E
  double area = 0.0;        // |E|
};

// D[e][alpha] = average of m_alpha over edge e (midpoint value; exact for
// affine monomials).
Eigen::MatrixXd dof_matrix(const ElementGeometry& geom);

// Energy projector onto {m1,m2,m3} expressed as a 3 x n_dofs matrix acting
// on DOF vectors. Gradient rows enforce
//   integral of grad(pi v).grad(m_a) = sum_e |e| (dm_a/dn)|_e dof_e,
// and the constant is fixed by matching the boundary mean of v.
Eigen::MatrixXd pi_nabla(const ElementGeometry& geom, const Eigen::MatrixXd& D);

// The L2 projector onto affine polynomials coincides with the energy
// projector at this order (enhancement constrains all of P1), so this simply
// returns the stored projector.
const Eigen::MatrixXd& pi_zero(const LocalVem& local);

// K_E = (c^2/rho) PiStar^T G PiStar + sigma (I - D PiStar)^T (I - D PiStar).
Eigen::MatrixXd local_stiffness(const ElementGeometry& geom, const LocalVem& local, double c,
                                double rho, double sigma_E);

// M_E = (1/rho) PiStar^T H PiStar + tau h^2 (I - D PiStar)^T (I - D PiStar).
Eigen::MatrixXd local_mass(const ElementGeometry& geom, const LocalVem& local, double rho,
                           double tau_E);

// Convenience: everything above in one pass.
LocalVem build_local_vem(const ElementGeometry& geom, double c, double rho,
                         const StabilizationParams& stab);

}  // namespace vemac
