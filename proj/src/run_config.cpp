#include "curveforge/run_config.hpp"

#include <cmath>
#include <filesystem>
#include <set>
#include <stdexcept>

#include "curveforge/field_io.hpp"

namespace curveforge {

namespace {

[[noreturn]] void reject(const std::string& field, const std::string& what) {
  throw std::invalid_argument(field + ": " + what);
}

// Validates one field input: a readable file or a parseable expression.
void check_field_input(const std::string& field, const std::string& text, int max_dim,
                       bool allow_time) {
  if (text.empty()) reject(field, "empty field input");
  if (is_field_file(text)) {
    const std::string path = field_file_path(text);
    if (!std::filesystem::exists(path)) reject(field, "field file not found: " + path);
    return;
  }
  Expression expr;
  try {
    expr = Expression::parse(text, max_dim);
  } catch (const std::invalid_argument& e) {
    reject(field, e.what());
  }
  if (!allow_time && expr.uses_time()) reject(field, "may not depend on t");
}

}  // namespace

int effective_sobolev(const RunConfig& cfg) {
  if (cfg.sobolev > 0) return cfg.sobolev;
  return static_cast<int>(std::floor(cfg.m / 2.0 + cfg.smoothness + 1.0));
}

bool is_field_file(const std::string& text) { return !text.empty() && text.front() == '@'; }

std::string field_file_path(const std::string& text) {
  return is_field_file(text) ? text.substr(1) : text;
}

void validate_config(const RunConfig& cfg) {
  const std::set<std::string> known = {"verify-curvature", "solve-linear", "solve",
                                       "energy-report", "reproduce"};
  if (!known.count(cfg.subcommand)) reject("subcommand", "unknown: " + cfg.subcommand);

  if (cfg.subcommand == "verify-curvature") {
    const std::set<std::string> presets = {"flat-zero", "sine-m1", "general-n"};
    if (!presets.count(cfg.preset)) reject("preset", "unknown: " + cfg.preset);
    if (!cfg.conformal.empty()) check_field_input("conformal", cfg.conformal, 1, false);
    return;
  }
  if (cfg.subcommand == "reproduce") {
    const std::set<std::string> presets = {"thm11-local", "thm12-smalldata",
                                           "prop63-uniqueness", "sec3-derivation"};
    if (!presets.count(cfg.preset)) reject("preset", "unknown: " + cfg.preset);
    return;
  }
  if (cfg.subcommand == "energy-report") {
    if (cfg.input.empty()) reject("input", "a solution field file is required");
    if (!std::filesystem::exists(cfg.input)) reject("input", "file not found: " + cfg.input);
    if (cfg.sobolev < 0) reject("s", "must be positive when set");
    if (cfg.smoothness < 0) reject("k", "must be non-negative");
    if (cfg.rtilde != "0") check_field_input("rtilde", cfg.rtilde, 3, true);
    return;
  }
  if (cfg.subcommand == "solve-linear") {
    if (cfg.preset.empty() == cfg.input.empty())
      reject("input", "exactly one of --preset or --config is required");
    if (!cfg.preset.empty() && cfg.preset != "standing-wave")
      reject("preset", "unknown: " + cfg.preset);
    if (!cfg.input.empty() && !std::filesystem::exists(cfg.input))
      reject("input", "config file not found: " + cfg.input);
    if (cfg.dt <= 0) reject("dt", "must be positive");
    if (cfg.kmax < 1) reject("kmax", "must be at least 1");
    if (cfg.tol < 0) reject("tol", "must be non-negative");
    return;
  }

  // solve
  if (cfg.m < 1 || cfg.m > 3) reject("m", "torus dimension must be 1, 2, or 3");
  if (cfg.points < 4) reject("N", "needs at least 4 samples per axis");
  if (cfg.kmax < 1) reject("kmax", "must be at least 1");
  if (!(cfg.dt > 0)) reject("dt", "must be positive");
  if (!(cfg.t_end > 0)) reject("T", "must be positive");
  if (cfg.dt > cfg.t_end) reject("dt", "exceeds the time interval");
  if (cfg.window < 0 || cfg.window > cfg.t_end) reject("t0", "must lie in [0, T]");
  if (cfg.smoothness < 0) reject("k", "must be non-negative");
  if (cfg.sobolev < 0) reject("s", "must be positive when set");
  if (cfg.sobolev > 0 && cfg.sobolev < cfg.m / 2 + 1)
    reject("s", "too small for the embedding threshold of this dimension");
  if (cfg.bound_d < 0) reject("D", "must be positive when set");
  if (!(cfg.tol > 0)) reject("tol", "must be positive");
  if (cfg.mode != "local" && cfg.mode != "small-data")
    reject("mode", "must be 'local' or 'small-data'");
  check_field_input("rtilde", cfg.rtilde, cfg.m, true);
  check_field_input("phi", cfg.phi, cfg.m, false);
  check_field_input("psi", cfg.psi, cfg.m, false);
  check_field_input("rg", cfg.rg, cfg.m, false);
}

GridField load_grid_input(const std::string& text, const TorusGrid& g) {
  if (is_field_file(text)) {
    const std::string path = field_file_path(text);
    GridField f = path.ends_with(".bin") ? read_grid_binary(path) : read_grid_csv(path);
    if (!(f.grid == g))
      throw std::invalid_argument(path + ": field grid does not match the run (dim " +
                                  std::to_string(g.dim()) + ", " +
                                  std::to_string(g.points_per_axis()) + " points per axis)");
    return f;
  }
  return Expression::parse(text, g.dim()).sample_at(g);
}

SpaceTimeField load_spacetime_input(const std::string& text, const TorusGrid& g,
                                    const Eigen::VectorXd& nodes) {
  if (is_field_file(text)) {
    const std::string path = field_file_path(text);
    SpaceTimeField f =
        path.ends_with(".bin") ? read_spacetime_binary(path) : read_spacetime_csv(path);
    if (!(f.grid == g))
      throw std::invalid_argument(path + ": field grid does not match the run (dim " +
                                  std::to_string(g.dim()) + ", " +
                                  std::to_string(g.points_per_axis()) + " points per axis)");
    return interpolate_time_nodes(f, nodes);
  }
  return Expression::parse(text, g.dim()).sample_spacetime(g, nodes);
}

}  // namespace curveforge
