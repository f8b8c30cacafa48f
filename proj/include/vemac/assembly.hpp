// Global DOF numbering (one DOF per mesh edge) and assembly of the sparse
// stiffness/mass/shifted systems from the local element matrices.
#pragma once

#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "vemac/mesh.hpp"
#include "vemac/vem_local.hpp"

namespace vemac {

struct DofMap {
  int n_dofs = 0;
  // local_to_global[c][k]: global DOF of edge k of cell c (mesh edge index).
  std::vector<std::vector<int>> local_to_global;
};

struct SystemMatrices {
  Eigen::SparseMatrix<double> A;     // stiffness (a_h)
  Eigen::SparseMatrix<double> M;     // mass (b_h)
  Eigen::SparseMatrix<double> Ahat;  // A + M, the coercive shifted form
};

struct MaterialParams {
  double c = 1.0;
  // Density per cell; a single entry means uniform. Any other mismatch with
  // the cell count is a parameter error.
  std::vector<double> rho = {1.0};

  double rho_of(int cell) const { return rho.size() == 1 ? rho[0] : rho[cell]; }
};

// Edges become DOFs one-to-one; boundary edges keep theirs (Neumann).
DofMap build_dof_map(const PolyMesh& mesh);

// Scatter-adds K_E and M_E over the cells in index order (deterministic
// floating-point reduction). Also returns the per-cell LocalVem data when a
// non-null sink is passed (reused for error evaluation and postprocessing).
SystemMatrices assemble(const PolyMesh& mesh, const DofMap& dofmap, const MaterialParams& materials,
                        const StabilizationParams& stab,
                        std::vector<LocalVem>* local_out = nullptr);

// MatrixMarket coordinate format for external cross-checks.
void write_matrix_market(const Eigen::SparseMatrix<double>& mat, const std::string& path);

}  // namespace vemac
