#include "vemac/assembly.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>

#include "vemac/errors.hpp"

namespace vemac {

DofMap build_dof_map(const PolyMesh& mesh) {
  DofMap dm;
  dm.n_dofs = mesh.n_edges();
  dm.local_to_global = mesh.cell_edges;
  return dm;
}

SystemMatrices assemble(const PolyMesh& mesh, const DofMap& dofmap, const MaterialParams& materials,
                        const StabilizationParams& stab, std::vector<LocalVem>* local_out) {
  const int nc = mesh.n_cells();
  if (materials.rho.size() != 1 && static_cast<int>(materials.rho.size()) != nc)
    throw ParameterError("assemble: rho table must have 1 or n_cells entries");
  if (stab.sigma < 0.0 || stab.tau < 0.0)
    throw ParameterError("assemble: stabilization parameters must be >= 0");

  std::vector<Eigen::Triplet<double>> ta, tm;
  if (local_out) {
    local_out->clear();
    local_out->reserve(nc);
  }
  for (int c = 0; c < nc; ++c) {
    const ElementGeometry geom = element_geometry(mesh, c);
    LocalVem local = build_local_vem(geom, materials.c, materials.rho_of(c), stab);
    const auto& l2g = dofmap.local_to_global[c];
    for (int i = 0; i < local.n_dofs; ++i)
      for (int j = 0; j < local.n_dofs; ++j) {
        ta.emplace_back(l2g[i], l2g[j], local.K(i, j));
        tm.emplace_back(l2g[i], l2g[j], local.M(i, j));
      }
    if (local_out) local_out->push_back(std::move(local));
  }

  SystemMatrices sys;
  sys.A.resize(dofmap.n_dofs, dofmap.n_dofs);
  sys.M.resize(dofmap.n_dofs, dofmap.n_dofs);
  // setFromTriplets sums duplicates in a fixed order for a fixed triplet
  // sequence, so assembling twice is bit-identical.
  sys.A.setFromTriplets(ta.begin(), ta.end());
  sys.M.setFromTriplets(tm.begin(), tm.end());
  sys.Ahat = sys.A + sys.M;
  return sys;
}

void write_matrix_market(const Eigen::SparseMatrix<double>& mat, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write matrix file: " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << mat.rows() << " " << mat.cols() << " " << mat.nonZeros() << "\n";
  char buf[64];
  for (int k = 0; k < mat.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(mat, k); it; ++it) {
      std::snprintf(buf, sizeof buf, "%ld %ld %.17g\n", static_cast<long>(it.row() + 1),
                    static_cast<long>(it.col() + 1), it.value());
      out << buf;
    }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace vemac
