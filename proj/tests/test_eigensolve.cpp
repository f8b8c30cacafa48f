#include <cmath>

#include <doctest.h>

#include "vemac/assembly.hpp"
#include "vemac/eigensolve.hpp"
#include "vemac/errors.hpp"
#include "vemac/generators.hpp"

using namespace vemac;

namespace {

Eigen::SparseMatrix<double> diag(std::initializer_list<double> values) {
  const int n = static_cast<int>(values.size());
  Eigen::SparseMatrix<double> S(n, n);
  int i = 0;
  for (double v : values) S.insert(i, i) = v, ++i;
  S.makeCompressed();
  return S;
}

struct RectSystem {
  PolyMesh mesh;
  DofMap dofmap;
  SystemMatrices sys;
};

RectSystem rect_system(int n) {
  RectSystem r;
  r.mesh = generate_rect_quads(n, n, 1.0, 1.1);
  r.dofmap = build_dof_map(r.mesh);
  MaterialParams mat;
  StabilizationParams stab;
  r.sys = assemble(r.mesh, r.dofmap, mat, stab);
  return r;
}

}  // namespace

TEST_CASE("diagonal toy pencil") {
  const auto A = diag({0.0, 2.0});
  const auto M = diag({1.0, 2.0});
  const Spectrum sp = solve_generalized(A, M, 2);
  REQUIRE(sp.values.size() == 2);
  CHECK(std::abs(sp.values[0]) <= 1e-12);
  CHECK(sp.values[1] == doctest::Approx(1.0).epsilon(1e-10));
  // M-orthonormal eigenvectors.
  const Eigen::MatrixXd VtMV = sp.vectors.transpose() * (M * sp.vectors);
  CHECK((VtMV - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("repeated eigenvalues are recovered through deflation restarts") {
  const auto A = diag({0.0, 1.0, 1.0, 2.0, 5.0});
  const auto M = diag({1.0, 1.0, 1.0, 1.0, 1.0});
  const Spectrum sp = solve_generalized(A, M, 5);
  REQUIRE(sp.values.size() == 5);
  CHECK(std::abs(sp.values[0]) <= 1e-12);
  CHECK(sp.values[1] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(sp.values[2] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(sp.values[3] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(sp.values[4] == doctest::Approx(5.0).epsilon(1e-10));
}

TEST_CASE("assembled pencil matches a dense direct reference") {
  const RectSystem r = rect_system(4);
  const int n_ev = 7;
  const Spectrum sp = solve_generalized(r.sys.A, r.sys.M, n_ev);

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ref(
      Eigen::MatrixXd(r.sys.A), Eigen::MatrixXd(r.sys.M));
  for (int i = 0; i < n_ev; ++i) {
    const double exact = ref.eigenvalues()[i];
    if (std::abs(exact) < 1e-9)
      CHECK(std::abs(sp.values[i]) <= 1e-9);
    else
      CHECK(sp.values[i] == doctest::Approx(exact).epsilon(1e-9));
  }

  // Residual contract, checked directly.
  const double normA = Eigen::MatrixXd(r.sys.A).cwiseAbs().colwise().sum().maxCoeff();
  const double normM = Eigen::MatrixXd(r.sys.M).cwiseAbs().colwise().sum().maxCoeff();
  for (int i = 0; i < n_ev; ++i) {
    const Eigen::VectorXd x = sp.vectors.col(i);
    const double res = (r.sys.A * x - sp.values[i] * (r.sys.M * x)).norm();
    CHECK(res <= 1e-8 * (normA + std::abs(sp.values[i]) * normM));
    CHECK(sp.residuals[i] == doctest::Approx(res).epsilon(1e-10));
  }
}

TEST_CASE("solver is deterministic for a fixed seed") {
  const RectSystem r = rect_system(4);
  const Spectrum a = solve_generalized(r.sys.A, r.sys.M, 5);
  const Spectrum b = solve_generalized(r.sys.A, r.sys.M, 5);
  REQUIRE(a.values.size() == b.values.size());
  for (size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
  CHECK((a.vectors - b.vectors).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero mode handling") {
  const RectSystem r = rect_system(8);
  const Spectrum sp = solve_generalized(r.sys.A, r.sys.M, 6);
  const Spectrum kept = drop_zero_mode(sp);
  CHECK(kept.values.size() == sp.values.size() - 1);
  CHECK(kept.values[0] > 1e-3);

  // A spectrum with no near-zero value must be refused.
  Spectrum fake;
  fake.values = {1.0, 2.0, 3.0};
  fake.vectors = Eigen::MatrixXd::Identity(3, 3);
  fake.residuals = {0.0, 0.0, 0.0};
  CHECK_THROWS_AS(drop_zero_mode(fake), ModeError);

  // Two near-zero values signal a disconnected mesh.
  Spectrum split;
  split.values = {1e-14, 2e-14, 3.0};
  split.vectors = Eigen::MatrixXd::Identity(3, 3);
  split.residuals = {0.0, 0.0, 0.0};
  CHECK_THROWS_AS(drop_zero_mode(split), ModeError);

  Spectrum tiny;
  tiny.values = {0.0};
  tiny.vectors = Eigen::MatrixXd::Identity(1, 1);
  tiny.residuals = {0.0};
  CHECK_THROWS_AS(drop_zero_mode(tiny), ModeError);
}

TEST_CASE("shifted and unshifted formulations agree") {
  const RectSystem r = rect_system(6);
  CHECK(shifted_crosscheck(r.sys.A, r.sys.M, 5) <= 1e-8);

  // Diagonal toy: the identity is exact.
  const auto A = diag({0.0, 1.0, 4.0});
  const auto M = diag({1.0, 1.0, 1.0});
  CHECK(shifted_crosscheck(A, M, 1) <= 1e-10);
}

TEST_CASE("inertia counts match the computed spectrum") {
  const RectSystem r = rect_system(5);
  const Spectrum sp = solve_generalized(r.sys.A, r.sys.M, 8);
  // Probe between consecutive distinct eigenvalues.
  for (int i : {2, 6}) {
    const double probe = 0.5 * (sp.values[i] + sp.values[i + 1]);
    int expected = 0;
    for (double v : sp.values)
      if (v < probe) ++expected;
    CHECK(inertia_count(r.sys.A, r.sys.M, probe) == expected);
  }
}

TEST_CASE("input validation") {
  const auto A = diag({1.0, 2.0});
  const auto M = diag({1.0, 1.0});
  CHECK_THROWS_AS(solve_generalized(A, M, 0), ParameterError);
  CHECK_THROWS_AS(solve_generalized(A, M, 3), ParameterError);

  // Indefinite "mass" fails the Cholesky factorization.
  const auto Mbad = diag({1.0, -1.0});
  CHECK_THROWS_AS(solve_generalized(A, Mbad, 1), FactorizationError);
}

TEST_CASE("spectrum is invariant under cyclic relabeling of a cell") {
  const std::vector<Point2> verts = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const PolyMesh m1 = build_edges(verts, {{0, 1, 2, 3}});
  const PolyMesh m2 = build_edges(verts, {{2, 3, 0, 1}});

  MaterialParams mat;
  StabilizationParams stab;
  const SystemMatrices s1 = assemble(m1, build_dof_map(m1), mat, stab);
  const SystemMatrices s2 = assemble(m2, build_dof_map(m2), mat, stab);
  const Spectrum p1 = solve_generalized(s1.A, s1.M, 4);
  const Spectrum p2 = solve_generalized(s2.A, s2.M, 4);
  for (int i = 0; i < 4; ++i)
    CHECK(p1.values[i] == doctest::Approx(p2.values[i]).epsilon(1e-10));
}
