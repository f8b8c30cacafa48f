#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vemac/analysis.hpp"
#include "vemac/assembly.hpp"
#include "vemac/generators.hpp"

namespace vemac {

// A refinement study on one geometry/mesh family: solve every level, track
// the lowest eigenvalues, fit convergence orders, optionally sweep the
// stiffness stabilization weight and classify spectral pollution.
struct ExperimentConfig {
  int schema = 1;
  std::string name = "experiment";
  std::string geometry = "rect";  // rect | lshape | ring
  MeshFamily family = MeshFamily::quads;
  std::vector<int> levels;  // N per level (grid count / seeds^1/2 / boundary cells)

  // Rectangle extent and family-specific generator knobs.
  double lx = 1.0, ly = 1.1;
  double distort_amplitude = 0.2;
  double tri_deform = 0.2;
  int lloyd_iters = 10;

  MaterialParams materials;
  StabilizationParams stab;
  std::vector<double> sigma_sweep;  // nonempty switches to sweep mode

  int n_ev = 8;     // eigenvalues kept per level (after the zero mode)
  int track = 4;    // how many of them get order fits
  bool normalized = false;  // report lambda / (c^2 pi^2)
  bool use_exact_reference = false;  // rect closed form for lambda_ref columns
  std::vector<double> lambda_ref;    // explicit references (reported units)
  std::vector<int> ref_multiplicity; // parallel to lambda_ref; default 1

  double window_cap = 0.0;   // spurious window in reported units (sweep mode)
  double match_rtol = 0.15;  // matching tolerance at the coarsest level
  bool tighten_match = true; // scale match_rtol with (h/h0)^2, floored

  double rtol = 1e-8;
  bool crosscheck = false;     // shifted solve agreement per level
  bool inertia_check = false;  // Sylvester counts at two probes per level
  bool export_fields = false;  // VTK of the first nonzero mode per level
  std::string output_dir = ".";
  std::uint64_t seed = 1;
};

// Strict JSON loader: versioned schema, unknown keys rejected.
ExperimentConfig load_config(const std::string& path);

struct LevelResult {
  int n = 0;
  double h = 0.0;
  int n_dofs = 0;
  std::vector<double> lambdas;  // reported units, zero mode dropped
  double crosscheck_discrepancy = -1.0;  // -1 when not run
};

struct ExperimentResult {
  std::vector<LevelResult> levels;
  std::vector<FitResult> fits;          // per tracked eigenvalue
  std::vector<SpuriousReport> sweep;    // per (sigma, level), row-major, sweep mode
  bool invariants_ok = true;
  std::vector<std::string> failures;    // human-readable invariant failures
  std::vector<std::string> files;       // everything written
};

// Runs the study and writes the eigenvalue CSV (columns level, h, index,
// lambda_h, lambda_ref, rel_err, flag), a human-readable report with Order
// and Extr. columns, per-sigma CSVs in sweep mode, and optional VTK fields.
// The output directory can be overridden with the VEMAC_OUT_DIR environment
// variable. All randomness derives from config.seed; reruns are
// byte-identical.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace vemac
