#include <cstdio>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "vemac/assembly.hpp"
#include "vemac/errors.hpp"
#include "vemac/generators.hpp"

using namespace vemac;

namespace {

SystemMatrices assemble_rect(int n, double rho = 1.0) {
  const PolyMesh mesh = generate_rect_quads(n, n, 1.0, 1.1);
  const DofMap dofmap = build_dof_map(mesh);
  MaterialParams mat;
  mat.rho = {rho};
  StabilizationParams stab;
  return assemble(mesh, dofmap, mat, stab);
}

}  // namespace

TEST_CASE("dof map matches the edge count") {
  const PolyMesh mesh = generate_rect_quads(8, 8, 1.0, 1.1);
  const DofMap dm = build_dof_map(mesh);
  CHECK(dm.n_dofs == 144);
  REQUIRE(dm.local_to_global.size() == static_cast<size_t>(mesh.n_cells()));
  for (int c = 0; c < mesh.n_cells(); ++c)
    CHECK(dm.local_to_global[c] == mesh.cell_edges[c]);
}

TEST_CASE("two-cell mesh has seven degrees of freedom") {
  const PolyMesh mesh = build_edges({{0, 0}, {1, 0}, {2, 0}, {0, 1}, {1, 1}, {2, 1}},
                                    {{0, 1, 4, 3}, {1, 2, 5, 4}});
  CHECK(build_dof_map(mesh).n_dofs == 7);
}

TEST_CASE("constants are the exact kernel of the assembled stiffness") {
  const SystemMatrices sys = assemble_rect(6);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(sys.A.rows());
  const double scale = Eigen::MatrixXd(sys.A).cwiseAbs().maxCoeff();
  CHECK((sys.A * ones).cwiseAbs().maxCoeff() <= 1e-12 * scale);
}

TEST_CASE("total discrete mass is the domain measure over rho") {
  const double rho = 2.5;
  const SystemMatrices sys = assemble_rect(6, rho);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(sys.M.rows());
  CHECK(ones.dot(sys.M * ones) == doctest::Approx(1.1 / rho).epsilon(1e-12));
}

TEST_CASE("assembled matrices are symmetric and the shifted form is A + M") {
  const SystemMatrices sys = assemble_rect(4);
  const Eigen::MatrixXd A(sys.A), M(sys.M), Ahat(sys.Ahat);
  CHECK((A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-13 * A.cwiseAbs().maxCoeff());
  CHECK((M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK((Ahat - (A + M)).cwiseAbs().maxCoeff() <= 1e-14 * Ahat.cwiseAbs().maxCoeff());
}

TEST_CASE("per-cell density list must match the cell count") {
  const PolyMesh mesh = generate_rect_quads(3, 3, 1.0, 1.0);
  const DofMap dofmap = build_dof_map(mesh);
  MaterialParams mat;
  mat.rho = {1.0, 2.0};  // neither 1 nor n_cells entries
  StabilizationParams stab;
  CHECK_THROWS_AS(assemble(mesh, dofmap, mat, stab), ParameterError);

  mat.rho.assign(9, 1.5);
  CHECK_NOTHROW(assemble(mesh, dofmap, mat, stab));
}

TEST_CASE("assemble can hand back the per-cell local matrices") {
  const PolyMesh mesh = generate_rect_quads(3, 3, 1.0, 1.1);
  const DofMap dofmap = build_dof_map(mesh);
  MaterialParams mat;
  StabilizationParams stab;
  std::vector<LocalVem> locals;
  const SystemMatrices sys = assemble(mesh, dofmap, mat, stab, &locals);
  REQUIRE(locals.size() == static_cast<size_t>(mesh.n_cells()));
  // Re-scatter the locals and compare against the sparse result.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dofmap.n_dofs, dofmap.n_dofs);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& dofs = dofmap.local_to_global[c];
    for (size_t i = 0; i < dofs.size(); ++i)
      for (size_t j = 0; j < dofs.size(); ++j) A(dofs[i], dofs[j]) += locals[c].K(i, j);
  }
  CHECK((A - Eigen::MatrixXd(sys.A)).cwiseAbs().maxCoeff() <=
        1e-13 * A.cwiseAbs().maxCoeff());
}

TEST_CASE("matrix market export round-trips") {
  const SystemMatrices sys = assemble_rect(3);
  const std::string path = "mm_test_A.mtx";
  write_matrix_market(sys.A, path);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "%%MatrixMarket matrix coordinate real general");
  long rows = 0, cols = 0, nnz = 0;
  in >> rows >> cols >> nnz;
  CHECK(rows == sys.A.rows());
  CHECK(cols == sys.A.cols());
  CHECK(nnz == sys.A.nonZeros());
  // Re-read every entry and compare.
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(rows, cols);
  for (long k = 0; k < nnz; ++k) {
    long i = 0, j = 0;
    double v = 0.0;
    in >> i >> j >> v;
    R(i - 1, j - 1) += v;
  }
  CHECK((R - Eigen::MatrixXd(sys.A)).cwiseAbs().maxCoeff() <= 1e-15 * R.cwiseAbs().maxCoeff());
  std::remove(path.c_str());
}
