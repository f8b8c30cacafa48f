// Generalized symmetric eigenproblem A v = lambda M v (A PSD, M SPD),
// smallest eigenvalues. The problem is reduced to standard form through a
// dense Cholesky factorization of M and solved by shift-invert Lanczos with
// full reorthogonalization; returned eigenvectors are M-orthonormal.
#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace vemac {

struct Spectrum {
  std::vector<double> values;     // ascending
  Eigen::MatrixXd vectors;        // n x n_ev, M-orthonormal columns
  std::vector<double> residuals;  // ||A v - lambda M v||_2 per pair
};

struct SolveOptions {
  double rtol = 1e-8;      // residual contract: r <= rtol*(||A||_1 + |lambda|*||M||_1)
  double shift = 0.0;      // spectral shift; <= 0 picks one from trace ratios
  int max_basis = 0;       // Lanczos basis cap; 0 picks one from n_ev
  std::uint64_t seed = 0x5eed5eedULL;  // start-vector seed (deterministic)
};

Spectrum solve_generalized(const Eigen::SparseMatrix<double>& A,
                           const Eigen::SparseMatrix<double>& M, int n_ev,
                           const SolveOptions& opts);

inline Spectrum solve_generalized(const Eigen::SparseMatrix<double>& A,
                                  const Eigen::SparseMatrix<double>& M, int n_ev,
                                  double rtol = 1e-8) {
  SolveOptions opts;
  opts.rtol = rtol;
  return solve_generalized(A, M, n_ev, opts);
}

// Removes the single near-zero eigenvalue (|lambda| <= tol_zero * first
// nonzero value) of the pure-Neumann problem. Zero or several near-zero
// modes signal a disconnected mesh or broken assembly and throw ModeError.
Spectrum drop_zero_mode(const Spectrum& spectrum, double tol_zero = 1e-8);

// Solves (A+M) v = shifted M v alongside the unshifted problem and returns
// the max relative difference between (shifted - 1) and unshifted values
// over the first n_ev nonzero pairs.
double shifted_crosscheck(const Eigen::SparseMatrix<double>& A,
                          const Eigen::SparseMatrix<double>& M, int n_ev);

// Number of eigenvalues of (A, M) strictly below probe, by Sylvester's law:
// negative-eigenvalue count of the symmetric factorization of A - probe*M.
int inertia_count(const Eigen::SparseMatrix<double>& A, const Eigen::SparseMatrix<double>& M,
                  double probe);

}  // namespace vemac
