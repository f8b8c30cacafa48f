#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vemac/geometry.hpp"
#include "vemac/mesh.hpp"

namespace vemac {

struct DofMap;

// One reference eigenvalue with its multiplicity and an optional mode label.
struct ReferenceValue {
  double lambda = 0.0;
  int multiplicity = 1;
  std::string label;
};

// Sorted list of reference eigenvalues. `normalized` records whether the
// stored values are lambda / norm_factor (the rectangle tables use
// norm_factor = c^2 pi^2) or raw.
struct ReferenceSpectrum {
  std::vector<ReferenceValue> values;
  bool normalized = false;
  double norm_factor = 1.0;

  // Values repeated by multiplicity, ascending.
  std::vector<double> expanded() const;
  // Copy with every lambda divided by norm_factor and the flag set.
  ReferenceSpectrum normalized_view() const;
};

// Eigenvalues of the Neumann Laplacian scaled by c^2 on the rectangle
// (0,1) x (0,1.1): lambda_{nm} = c^2 pi^2 (n^2 + (m/1.1)^2), (n,m) != (0,0).
// Returns the `count` smallest, labeled "(n,m)", with norm_factor = c^2 pi^2.
ReferenceSpectrum exact_rect_eigs(double c, int count);

// Closed-form mode (n,m) of the rectangle above. `displacement` equals
// grad(pressure) exactly: pressure = -(1/pi) cos(n pi x) cos(m pi y / 1.1),
// displacement = (n sin(n pi x) cos(m pi y/1.1), (m/1.1) cos(n pi x) sin(m pi y/1.1)).
struct ExactEigenfunction {
  std::function<double(const Point2&)> pressure;
  std::function<Point2(const Point2&)> displacement;
};

ExactEigenfunction exact_rect_eigfun(int n, int m);

struct FitResult {
  double order = 0.0;         // fitted exponent t
  double extrapolated = 0.0;  // lambda_extr (echoes lambda_exact when given)
  double residual = 0.0;      // rms misfit of the accepted model
};

// Least-squares convergence fit on (h, lambda_h) samples. With lambda_exact
// the order is the slope of log|lambda_h - lambda_exact| against log h.
// Without it, a damped Gauss-Newton iteration fits the three-parameter model
// lambda_h = lambda_extr + C h^t starting from t = 2 and (lambda_extr, C)
// solved on the two coarsest levels. Needs at least 3 levels with distinct h.
FitResult fit_order(const std::vector<std::pair<double, double>>& levels,
                    std::optional<double> lambda_exact = std::nullopt);

// Flag for one computed eigenvalue below the window cap.
struct SpuriousFlag {
  double lambda = 0.0;
  bool spurious = false;
  double match_distance = 0.0;  // relative distance to the matched reference
  int ref_slot = -1;            // index into the expanded reference list
};

struct SpuriousReport {
  std::vector<SpuriousFlag> flags;  // one per computed value <= window_cap
  int n_spurious = 0;
  double window_cap = 0.0;
};

// Greedy ascending one-to-one matching of computed eigenvalues to reference
// slots within relative tolerance match_rtol. Every computed value at or
// below window_cap receives exactly one flag; unmatched ones are spurious.
// Reference slots slightly above the cap stay in the matching pool so a
// computed value near the cap is not misflagged.
SpuriousReport classify_spurious(const std::vector<double>& computed,
                                 const ReferenceSpectrum& reference, double window_cap,
                                 double match_rtol = 0.15);

struct BrokenErrors {
  double l2 = 0.0;         // || p_h - p ||_{L2}
  double h1 = 0.0;         // broken H1 seminorm of the reconstruction error
  double align_norm = 0.0; // L2 norm of the aligned exact combination
};

// Compares the elementwise Ritz-projection reconstruction of `eigvec`
// against the span of `exact_fields` (the exact eigenspace; usually one
// field). The exact combination is least-squares aligned to the computed
// field, which makes the result invariant under sign flips and handles
// multiplicity > 1. Quadrature: the degree-2 rule on the centroid fan.
BrokenErrors broken_errors(const PolyMesh& mesh, const DofMap& dofmap,
                           const Eigen::VectorXd& eigvec,
                           const std::vector<ExactEigenfunction>& exact_fields);

}  // namespace vemac
