// Command-line front end: mesh generation, single solves, refinement/sweep
// experiments from JSON configs, and convergence-order fits on CSV tables.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vemac/analysis.hpp"
#include "vemac/assembly.hpp"
#include "vemac/eigensolve.hpp"
#include "vemac/errors.hpp"
#include "vemac/experiment.hpp"
#include "vemac/generators.hpp"
#include "vemac/mesh_io.hpp"

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int cmd_mesh_gen(const std::string& geometry, const std::string& family_str, int n, double lx,
                 double ly, std::uint64_t seed, const std::string& out) {
  const vemac::MeshFamily family = vemac::parse_family(family_str);
  vemac::PolyMesh mesh;
  if (geometry == "rect") {
    switch (family) {
      case vemac::MeshFamily::quads: mesh = vemac::generate_rect_quads(n, n, lx, ly); break;
      case vemac::MeshFamily::distorted:
        mesh = vemac::generate_rect_distorted(n, n, lx, ly, 0.2, seed);
        break;
      case vemac::MeshFamily::triangles:
        mesh = vemac::generate_rect_triangles(n, n, lx, ly, 0.2, seed);
        break;
      case vemac::MeshFamily::voronoi:
        mesh = vemac::generate_voronoi_lloyd(vemac::VoronoiDomain::rectangle(lx, ly), n * n, 10,
                                             seed);
        break;
    }
  } else if (geometry == "lshape") {
    mesh = vemac::generate_lshape(family, n, seed);
  } else if (geometry == "ring") {
    mesh = vemac::generate_ring(family, n, seed);
  } else {
    throw vemac::ParameterError("geometry must be rect, lshape, or ring");
  }
  vemac::save_mesh_json(mesh, out);
  std::cout << "wrote " << out << ": " << mesh.n_cells() << " cells, " << mesh.n_vertices()
            << " vertices, " << mesh.n_edges() << " edges\n";
  return 0;
}

int cmd_solve(const std::string& mesh_path, int n_ev, double c, double rho, double sigma,
              double tau, double rtol, std::uint64_t seed, const std::string& out_prefix,
              bool matrix_dump) {
  const vemac::PolyMesh mesh = vemac::load_mesh_json(mesh_path);
  const vemac::DofMap dofmap = vemac::build_dof_map(mesh);
  vemac::MaterialParams materials;
  materials.c = c;
  materials.rho = {rho};
  vemac::StabilizationParams stab;
  stab.sigma = sigma;
  stab.tau = tau;
  const vemac::SystemMatrices sys = vemac::assemble(mesh, dofmap, materials, stab);

  if (matrix_dump) {
    vemac::write_matrix_market(sys.A, out_prefix + "_A.mtx");
    vemac::write_matrix_market(sys.M, out_prefix + "_M.mtx");
    std::cout << "wrote " << out_prefix << "_A.mtx and " << out_prefix << "_M.mtx\n";
  }

  vemac::SolveOptions opts;
  opts.rtol = rtol;
  opts.seed = seed;
  const int want = std::min(n_ev + 1, dofmap.n_dofs);
  const vemac::Spectrum kept =
      vemac::drop_zero_mode(vemac::solve_generalized(sys.A, sys.M, want, opts));

  const std::string csv_path = out_prefix + "_spectrum.csv";
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw vemac::IoError("cannot open " + csv_path);
  csv << "index,lambda,residual\n";
  for (size_t i = 0; i < kept.values.size(); ++i)
    csv << (i + 1) << "," << num(kept.values[i]) << "," << num(kept.residuals[i]) << "\n";
  std::cout << "wrote " << csv_path << " (" << kept.values.size()
            << " eigenvalues after dropping the zero mode)\n";
  for (size_t i = 0; i < kept.values.size(); ++i)
    std::cout << "  lambda_" << (i + 1) << " = " << num(kept.values[i]) << "\n";
  return 0;
}

int cmd_fit(const std::string& csv_path, int index, bool has_exact, double exact) {
  // Expects the experiment CSV schema: level,h,index,lambda_h,...
  std::ifstream in(csv_path);
  if (!in) throw vemac::IoError("cannot open " + csv_path);
  std::string line;
  if (!std::getline(in, line)) throw vemac::FormatError("empty CSV " + csv_path);
  std::vector<std::pair<double, double>> samples;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() < 4) throw vemac::FormatError("CSV row with fewer than 4 columns");
    if (std::stoi(cells[2]) != index) continue;
    samples.push_back({std::stod(cells[1]), std::stod(cells[3])});
  }
  if (samples.empty())
    throw vemac::FormatError("no rows with index " + std::to_string(index) + " in " + csv_path);
  const vemac::FitResult fit = vemac::fit_order(
      samples, has_exact ? std::optional<double>(exact) : std::nullopt);
  std::printf("order %.4f  extrapolated %.10g  residual %.3g\n", fit.order, fit.extrapolated,
              fit.residual);
  return 0;
}

int cmd_run(const std::string& config_path, bool need_sweep) {
  const vemac::ExperimentConfig cfg = vemac::load_config(config_path);
  if (need_sweep && cfg.sigma_sweep.empty())
    throw vemac::ParameterError("sweep-sigma needs a config with a sigma_sweep array");
  const vemac::ExperimentResult res = vemac::run_experiment(cfg);
  for (const auto& f : res.files) std::cout << "wrote " << f << "\n";
  if (!res.invariants_ok) {
    std::cerr << "invariant failures:\n";
    for (const auto& f : res.failures) std::cerr << "  " << f << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lowest-order polygonal eigenvalue solver for the acoustic pressure problem"};
  app.require_subcommand(1);

  // mesh-gen
  auto* gen = app.add_subcommand("mesh-gen", "generate a mesh and write it as JSON");
  std::string g_geometry = "rect", g_family = "quads", g_out = "mesh.json";
  int g_n = 8;
  double g_lx = 1.0, g_ly = 1.1;
  std::uint64_t g_seed = 1;
  gen->add_option("--geometry", g_geometry, "rect | lshape | ring");
  gen->add_option("--family", g_family, "quads | distorted | voronoi | triangles");
  gen->add_option("--n", g_n, "refinement level (grid count / sqrt(seeds) / boundary cells)");
  gen->add_option("--lx", g_lx, "rectangle width");
  gen->add_option("--ly", g_ly, "rectangle height");
  gen->add_option("--seed", g_seed, "generator seed");
  gen->add_option("--out", g_out, "output path");

  // solve
  auto* solve = app.add_subcommand("solve", "assemble and solve one mesh");
  std::string s_mesh, s_prefix = "solve";
  int s_nev = 8;
  double s_c = 1.0, s_rho = 1.0, s_sigma = 1.0, s_tau = 1.0, s_rtol = 1e-8;
  std::uint64_t s_seed = 1;
  bool s_dump = false;
  solve->add_option("--mesh", s_mesh, "mesh JSON path")->required();
  solve->add_option("--n-ev", s_nev, "eigenvalues to keep after the zero mode");
  solve->add_option("--c", s_c, "sound speed");
  solve->add_option("--rho", s_rho, "density");
  solve->add_option("--sigma", s_sigma, "stiffness stabilization weight");
  solve->add_option("--tau", s_tau, "mass stabilization weight");
  solve->add_option("--rtol", s_rtol, "residual tolerance");
  solve->add_option("--seed", s_seed, "solver seed");
  solve->add_option("--out", s_prefix, "output file prefix");
  solve->add_flag("--matrix-dump", s_dump, "also write A and M in MatrixMarket format");

  // fit
  auto* fit = app.add_subcommand("fit", "fit convergence order from an eigenvalue CSV");
  std::string f_csv;
  int f_index = 1;
  double f_exact = 0.0;
  fit->add_option("--csv", f_csv, "eigenvalue CSV path")->required();
  fit->add_option("--index", f_index, "eigenvalue index (1-based)");
  auto* f_exact_opt = fit->add_option("--exact", f_exact, "known exact value");

  // run / sweep-sigma
  auto* run = app.add_subcommand("run", "run a refinement experiment from a JSON config");
  std::string r_config;
  run->add_option("--config", r_config, "config path")->required();
  auto* sweep = app.add_subcommand("sweep-sigma", "run a stabilization sweep from a JSON config");
  std::string w_config;
  sweep->add_option("--config", w_config, "config path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_mesh_gen(g_geometry, g_family, g_n, g_lx, g_ly, g_seed, g_out);
    if (solve->parsed())
      return cmd_solve(s_mesh, s_nev, s_c, s_rho, s_sigma, s_tau, s_rtol, s_seed, s_prefix,
                       s_dump);
    if (fit->parsed()) return cmd_fit(f_csv, f_index, f_exact_opt->count() > 0, f_exact);
    if (run->parsed()) return cmd_run(r_config, false);
    if (sweep->parsed()) return cmd_run(w_config, true);
  } catch (const vemac::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
