// Run configuration shared by every CLI subcommand: numeric parameters,
// field inputs (inline expressions or "@path" field files), output routing,
// and validation that rejects out-of-range values with the field name before
// any computation starts.
#pragma once

#include <cstdint>
#include <string>

#include "curveforge/expression.hpp"

namespace curveforge {

struct RunConfig {
  std::string subcommand;

  int m = 1;            // torus dimension of the deformed factor
  int points = 32;      // N, samples per periodic axis
  int kmax = 8;         // spectral cutoff of the Galerkin basis
  double dt = 1e-3;     // integrator step
  double t_end = 1.0;   // T, length of the time interval
  double window = 0.0;  // t0; 0 = start from the full interval
  int smoothness = 2;   // k, extra derivatives above the embedding threshold
  int sobolev = 0;      // s override; 0 = derived from m and k
  double bound_d = 0.0; // iterate bound D; 0 = automatic from the data
  double tol = 1e-8;    // contraction / refinement tolerance

  // Field inputs: an expression in x[,y,z] and t, or "@path" naming a field
  // file (binary when the path ends in .bin, CSV otherwise).
  std::string rtilde = "0";  // prescribed curvature target
  std::string phi = "0";     // initial value
  std::string psi = "0";     // initial velocity
  std::string rg = "0";      // scalar curvature of the undeformed factor
  std::string conformal;     // optional conformal exponent for curved-factor
                             // curvature verification (empty = flat)

  std::string mode = "local";  // local | small-data
  bool adaptive = true;        // shrink the window on divergence
  bool binary_fields = false;  // write field artifacts in binary form

  std::string input;    // solve-linear config file / energy-report field file
  std::string preset;   // verify-curvature / reproduce preset name
  std::string out_dir = ".";
  std::uint64_t seed = 20240901;
};

// Throws std::invalid_argument naming the offending field; every check runs
// before the subcommand does any work.
void validate_config(const RunConfig& cfg);

// The Sobolev index used by the nonlinear solver: the explicit override when
// set, otherwise floor(m/2 + k + 1).
int effective_sobolev(const RunConfig& cfg);

// "@path" marks a field file; anything else is an expression.
bool is_field_file(const std::string& text);
std::string field_file_path(const std::string& text);

// Materializes a field input on the requested grid. Files must match the
// grid dimension and resolution exactly; expressions are sampled.
GridField load_grid_input(const std::string& text, const TorusGrid& g);
SpaceTimeField load_spacetime_input(const std::string& text, const TorusGrid& g,
                                    const Eigen::VectorXd& nodes);

}  // namespace curveforge
