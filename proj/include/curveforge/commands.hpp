// Subcommand entry points shared by the CLI binary and the test suite. Each
// command validates its configuration, runs the experiment, writes its
// artifacts (field files, CSV traces, a JSON report) under cfg.out_dir, and
// returns the verdict. Reports are deterministic: the same configuration and
// seed serialize to byte-identical JSON; wall time is kept out of them.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "curveforge/run_config.hpp"

namespace curveforge {

struct RunRecord {
  nlohmann::json report;               // serialized to <subcommand>_report.json
  bool pass = false;                   // overall verdict
  double wall_seconds = 0.0;           // console display only, never serialized
  std::vector<std::string> artifacts;  // files written, in creation order
};

// Curvature identity verification across a resolution ladder (presets
// flat-zero, sine-m1, general-n). Emits a CSV of
// (identity, points, max error, halving ratio) and passes when every identity
// either sits at rounding level or shrinks by at least 3x per halving.
RunRecord cmd_verify_curvature(const RunConfig& cfg);

// Linear evolution solve from a JSON config file naming coefficient fields,
// or the built-in standing-wave preset. Emits the solution field plus a JSON
// diagnostics record (cutoff ladder, refinement gaps, growth ratios).
RunRecord cmd_solve_linear(const RunConfig& cfg);

// Nonlinear solve for the prescribed-curvature deformation. Emits solution
// and residual fields and a report with the iteration history, window
// history, energy trace, and residual verdicts.
RunRecord cmd_solve(const RunConfig& cfg);

// Energy diagnostics of a stored space-time solution: per-level energies,
// total energy, and the growth-rate consistency verdict.
RunRecord cmd_energy_report(const RunConfig& cfg);

// End-to-end experiment presets: thm11-local, thm12-smalldata,
// prop63-uniqueness, sec3-derivation. Prints one verdict line per check.
RunRecord cmd_reproduce(const RunConfig& cfg);

// Full argument parsing and dispatch; returns the process exit code
// (0 = pass, 1 = computation or verdict failure, 2 = configuration error).
int run_cli(int argc, const char* const* argv);

}  // namespace curveforge
