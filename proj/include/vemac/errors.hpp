// Error types thrown across the library. Everything derives from Error so
// callers can catch one base; the concrete type tells you which contract broke.
#pragma once

#include <stdexcept>
#include <string>

namespace vemac {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Mesh connectivity is broken (non-manifold edge, bad vertex index, ...).
struct TopologyError : Error {
  using Error::Error;
};

// Malformed input (file contents, config values, cell with <3 vertices, ...).
struct FormatError : Error {
  using Error::Error;
};

// Degenerate element geometry (zero/negative area, singular Gram matrix).
struct GeometryError : Error {
  using Error::Error;
};

// Mesh generation produced a degenerate cell.
struct GenerationError : Error {
  using Error::Error;
};

// Triangulation of a polygon failed.
struct QuadratureError : Error {
  using Error::Error;
};

// Out-of-range or inconsistent parameters (negative stabilization, ...).
struct ParameterError : Error {
  using Error::Error;
};

// A matrix factorization failed (names the failing pivot where known).
struct FactorizationError : Error {
  using Error::Error;
};

// An iterative method did not converge within its budget.
struct IterationError : Error {
  using Error::Error;
};

// Nonlinear least-squares fit did not converge (message carries the trace).
struct FitError : Error {
  using Error::Error;
};

// Spectrum post-processing found the wrong number of near-zero modes.
struct ModeError : Error {
  using Error::Error;
};

// File I/O failure, message includes the path.
struct IoError : Error {
  using Error::Error;
};

}  // namespace vemac
