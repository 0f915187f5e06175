#include "curveforge/picard.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

#include "curveforge/spectral.hpp"

namespace curveforge {

namespace {

void check_frames(const SpaceTimeField& a, const SpaceTimeField& b, const char* what) {
  if (!(a.grid == b.grid) || a.node_count() != b.node_count())
    throw std::invalid_argument(std::string(what) + ": fields on mismatched frames");
  for (int j = 0; j < a.node_count(); ++j) {
    const double scale = std::max(1.0, std::abs(a.time_nodes[j]));
    if (std::abs(a.time_nodes[j] - b.time_nodes[j]) > 1e-9 * scale)
      throw std::invalid_argument(std::string(what) + ": fields on mismatched time nodes");
  }
}

// <grad a, grad b> at every time node, spectral per axis.
SpaceTimeField gradient_dot(const SpaceTimeField& a, const SpaceTimeField& b) {
  SpaceTimeField out(a.grid, a.time_nodes);
  for (int j = 0; j < a.node_count(); ++j) {
    const std::vector<GridField> ga = gradient(a.at_node(j));
    const std::vector<GridField> gb = gradient(b.at_node(j));
    Array acc = Array::Zero(static_cast<Eigen::Index>(a.grid.total_points()));
    for (std::size_t ax = 0; ax < ga.size(); ++ax) acc += ga[ax].samples * gb[ax].samples;
    out.values.col(j) = acc.matrix();
  }
  return out;
}

SpaceTimeField node_laplacian(const SpaceTimeField& u) {
  SpaceTimeField out(u.grid, u.time_nodes);
  for (int j = 0; j < u.node_count(); ++j) out.set_node(j, laplacian(u.at_node(j)));
  return out;
}

Eigen::ArrayXXd replicate_space(const GridField& f, int columns) {
  return f.samples.matrix().replicate(1, columns).array();
}

double sobolev_weight_poly(double lambda, int s) {
  double w = 0.0, p = 1.0;
  for (int j = 0; j <= s; ++j, p *= lambda) w += p;
  return w;
}

// C0(H^s) of the difference plus C0(H^{s-1}) of its time derivative, in
// coefficient space; both solutions must come from the same cutoff.
double iterate_distance(const GalerkinSolution& a, const GalerkinSolution& b, int s) {
  if (a.basis.size() != b.basis.size() || a.coeff.cols() != b.coeff.cols())
    throw std::invalid_argument("iterate_distance: incompatible solutions");
  double sup_u = 0.0, sup_ut = 0.0;
  for (Eigen::Index t = 0; t < a.coeff.cols(); ++t) {
    double su = 0.0, sut = 0.0;
    for (int i = 0; i < a.basis.size(); ++i) {
      const double lambda = a.basis.modes[i].lambda;
      const double du = a.coeff(i, t) - b.coeff(i, t);
      const double dut = a.coeff_dt(i, t) - b.coeff_dt(i, t);
      su += sobolev_weight_poly(lambda, s) * du * du;
      sut += sobolev_weight_poly(lambda, s - 1) * dut * dut;
    }
    sup_u = std::max(sup_u, su);
    sup_ut = std::max(sup_ut, sut);
  }
  return std::sqrt(sup_u) + std::sqrt(sup_ut);
}

double log_fit_r2(const std::vector<double>& d) {
  std::vector<double> y;
  for (double v : d)
    if (v > 0.0 && std::isfinite(v)) y.push_back(std::log(v));
  const int n = static_cast<int>(y.size());
  if (n < 3) return 1.0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sx += i;
    sy += y[i];
    sxx += static_cast<double>(i) * i;
    sxy += i * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double mean = sy / n;
  for (int i = 0; i < n; ++i) {
    const double fit = intercept + slope * i;
    ss_res += (y[i] - fit) * (y[i] - fit);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  if (ss_tot < 1e-20) return 1.0;
  return 1.0 - ss_res / ss_tot;
}

SpaceTimeField resample_space(const SpaceTimeField& f, int points) {
  if (static_cast<int>(f.grid.points_per_axis()) == points) return f;
  SpaceTimeField out(TorusGrid(f.grid.dim(), points), f.time_nodes);
  for (int j = 0; j < f.node_count(); ++j) out.set_node(j, resample(f.at_node(j), points));
  return out;
}

struct WindowOutcome {
  bool converged = false;
  bool needs_halving = false;
  bool bound_violated = false;
  bool have_solution = false;
  GalerkinSolution sol;
  SpaceTimeField u, ut;
  std::vector<double> distances, ratios, sup_norms;
  std::vector<EnergyTrace> energies;
};

WindowOutcome run_window(const SpaceTimeField& target, const GridField& phi, const GridField& psi,
                         const GridField& r_g, double t0, int s, double bound_d,
                         const PicardConfig& cfg, const GridField* seed, bool first_attempt) {
  WindowOutcome out;
  const TorusGrid& grid = phi.grid;
  const int steps = static_cast<int>(std::ceil(t0 / cfg.dt - 1e-9));
  if (steps < 3)
    throw std::invalid_argument("picard_solve: the window must cover at least 3 time steps");
  const Eigen::VectorXd nodes = uniform_nodes(0.0, t0, steps + 1);
  const SpaceTimeField target_w = interpolate_time_nodes(target, nodes);

  SpaceTimeField v(grid, nodes), vt(grid, nodes);
  if (seed != nullptr)
    for (int j = 0; j < v.node_count(); ++j) v.set_node(j, *seed);

  LinearSolveOptions lopts;
  lopts.kmax = cfg.kmax;
  lopts.dt = cfg.dt;
  lopts.record_stride = 1;
  lopts.tol = 0.0;

  GalerkinSolution prev;
  bool have_prev = false;
  for (int n = 1; n <= cfg.max_iters; ++n) {
    GalerkinSolution sol;
    try {
      const LinearCoefficients lc = linearize_step(v, vt, target_w, r_g);
      LinearProblem problem;
      problem.grid = grid;
      problem.damping = lc.damping;
      problem.stiffness = lc.stiffness;
      problem.gradient_coupling = lc.gradient_coupling;
      problem.potential = lc.potential;
      problem.forcing = lc.forcing;
      problem.initial_value = phi;
      problem.initial_velocity = psi;
      sol = solve_linear(problem, lopts);
    } catch (const std::invalid_argument&) {
      // A first-sweep refusal is a caller error; later ones mean the frozen
      // coefficients blew past the integrator's stability range.
      if (first_attempt && n == 1) throw;
      out.needs_halving = true;
      return out;
    } catch (const std::runtime_error&) {
      out.needs_halving = true;
      return out;
    }

    SpaceTimeField u_mat = sol.on_grid(grid);
    SpaceTimeField ut_mat = sol.on_grid_dt(grid);

    double d;
    if (have_prev) {
      d = iterate_distance(sol, prev, s);
    } else if (seed != nullptr) {
      GalerkinSolution start = sol;
      const Eigen::VectorXd c = project_initial_data(sol.basis, *seed);
      start.coeff = c.replicate(1, sol.coeff.cols());
      start.coeff_dt.setZero();
      d = iterate_distance(sol, start, s);
    } else {
      d = sol.sup_sobolev(s) + sol.sup_sobolev_dt(s - 1);
    }
    const double sup_b = sol.sup_sobolev(s + 1) + sol.sup_sobolev_dt(s);

    out.distances.push_back(d);
    if (out.distances.size() >= 2) {
      const double dp = out.distances[out.distances.size() - 2];
      out.ratios.push_back(dp > 0.0 ? d / dp : 0.0);
    }
    out.sup_norms.push_back(sup_b);
    out.energies.push_back(energy_trace(u_mat, ut_mat, u_mat, s));

    out.sol = std::move(sol);
    out.u = std::move(u_mat);
    out.ut = std::move(ut_mat);
    out.have_solution = true;

    if (!std::isfinite(d) || !std::isfinite(sup_b)) {
      out.needs_halving = true;
      return out;
    }
    if (sup_b > bound_d) {
      out.bound_violated = true;
      out.needs_halving = true;
      return out;
    }
    if (d < cfg.tol) {
      out.converged = true;
      return out;
    }
    const std::size_t nr = out.ratios.size();
    if (nr >= 2 && out.ratios[nr - 1] >= 0.95 && out.ratios[nr - 2] >= 0.95) {
      out.needs_halving = true;
      return out;
    }

    prev = out.sol;
    have_prev = true;
    v = out.u;
    vt = out.ut;
  }
  return out;  // max_iters exhausted without a stall signal
}

}  // namespace

SpaceTimeField nonlinear_rhs(const SpaceTimeField& u, const SpaceTimeField& v,
                             const SpaceTimeField& target, const GridField& r_g) {
  check_frames(u, v, "nonlinear_rhs");
  check_frames(u, target, "nonlinear_rhs");
  if (!(r_g.grid == u.grid)) throw std::invalid_argument("nonlinear_rhs: r_g grid mismatch");
  const double m = u.grid.dim();

  const SpaceTimeField vt = time_derivative(v, 1);
  const SpaceTimeField ut = time_derivative(u, 1);
  const SpaceTimeField dot = gradient_dot(v, u);

  const Eigen::ArrayXXd ev = v.values.array();
  const Eigen::ArrayXXd em = (-2.0 * m * ev).exp();
  const Eigen::ArrayXXd em1 = (-2.0 * (m + 1.0) * ev).exp();
  const Eigen::ArrayXXd rg = replicate_space(r_g, u.node_count());

  SpaceTimeField out(u.grid, u.time_nodes);
  out.values = (0.5 * (-em * target.values.array() + em1 * rg -
                       (m * m + m + 2.0) * em1 * dot.values.array() -
                       m * (3.0 * m + 1.0) * vt.values.array() * ut.values.array()))
                   .matrix();
  return out;
}

LinearCoefficients linearize_step(const SpaceTimeField& v, const SpaceTimeField& v_t,
                                  const SpaceTimeField& target, const GridField& r_g) {
  check_frames(v, v_t, "linearize_step");
  check_frames(v, target, "linearize_step");
  if (!(r_g.grid == v.grid)) throw std::invalid_argument("linearize_step: r_g grid mismatch");
  const double m = v.grid.dim();

  const Eigen::ArrayXXd ev = v.values.array();
  const Eigen::ArrayXXd em = (-2.0 * m * ev).exp();
  const Eigen::ArrayXXd em1 = (-2.0 * (m + 1.0) * ev).exp();
  const Eigen::ArrayXXd rg = replicate_space(r_g, v.node_count());

  LinearCoefficients lc{SpaceTimeField(v.grid, v.time_nodes), SpaceTimeField(v.grid, v.time_nodes),
                        SpaceTimeField(v.grid, v.time_nodes), SpaceTimeField(v.grid, v.time_nodes),
                        SpaceTimeField(v.grid, v.time_nodes)};
  lc.damping.values = (0.5 * (3.0 * m + 1.0) * v_t.values.array()).matrix();
  lc.stiffness.values = (em1 / m).matrix();
  lc.gradient_coupling.values =
      ((m * m + m + 2.0) / (4.0 * m * (m + 1.0)) * em1).matrix();
  lc.forcing.values = ((-em * target.values.array() + em1 * rg) / (2.0 * m)).matrix();
  return lc;
}

LinearCoefficients linearize_step(const SpaceTimeField& v, const SpaceTimeField& target,
                                  const GridField& r_g) {
  return linearize_step(v, time_derivative(v, 1), target, r_g);
}

SpaceTimeField curvature_residual(const SpaceTimeField& u, const SpaceTimeField& target,
                                  const GridField& r_g) {
  check_frames(u, target, "curvature_residual");
  if (!(r_g.grid == u.grid)) throw std::invalid_argument("curvature_residual: r_g grid mismatch");
  const double m = u.grid.dim();

  const SpaceTimeField ut = time_derivative(u, 1);
  const SpaceTimeField utt = time_derivative(u, 2);
  const SpaceTimeField lap = node_laplacian(u);
  const SpaceTimeField gsq = gradient_dot(u, u);

  const Eigen::ArrayXXd eu = u.values.array();
  const Eigen::ArrayXXd edown = (-2.0 * eu).exp();   // e^{-2u}
  const Eigen::ArrayXXd eup = (2.0 * m * eu).exp();  // e^{2mu}
  const Eigen::ArrayXXd rg = replicate_space(r_g, u.node_count());

  SpaceTimeField out(u.grid, u.time_nodes);
  out.values = (edown * rg + 2.0 * edown * lap.values.array() -
                2.0 * m * eup * utt.values.array() -
                (m * m + m + 2.0) * edown * gsq.values.array() -
                m * (3.0 * m + 1.0) * eup * ut.values.array().square() -
                target.values.array())
                   .matrix();
  return out;
}

double max_interior_residual(const SpaceTimeField& residual) {
  if (residual.node_count() < 3)
    throw std::invalid_argument("max_interior_residual: need at least 3 time nodes");
  double sup = 0.0;
  for (int j = 1; j + 1 < residual.node_count(); ++j)
    sup = std::max(sup, residual.values.col(j).array().abs().maxCoeff());
  return sup;
}

NonlinearSolution picard_solve(const SpaceTimeField& target, const GridField& phi,
                               const GridField& psi, const GridField& r_g,
                               const PicardConfig& cfg, const GridField* seed) {
  if (!(phi.grid == target.grid) || !(psi.grid == target.grid) || !(r_g.grid == target.grid))
    throw std::invalid_argument("picard_solve: data grids must match the target");
  if (target.node_count() < 2 || std::abs(target.time_nodes[0]) > 1e-12)
    throw std::invalid_argument("picard_solve: target must start at t = 0");
  if (cfg.kmax < 1 || cfg.dt <= 0.0 || cfg.max_iters < 1 || cfg.tol <= 0.0)
    throw std::invalid_argument("picard_solve: bad configuration");
  const int m = target.grid.dim();
  const int s = static_cast<int>(std::floor(m / 2.0 + cfg.smoothness + 1.0));

  // Working resolution: iterates carry modes up to kmax, which the grid must
  // represent without aliasing.
  const int need = 2 * cfg.kmax + 2;
  const int points = std::max(static_cast<int>(target.grid.points_per_axis()), need);
  const SpaceTimeField target_w = resample_space(target, points);
  const GridField phi_w = resample(phi, points);
  const GridField psi_w = resample(psi, points);
  const GridField rg_w = resample(r_g, points);
  GridField seed_w;
  if (seed != nullptr) seed_w = resample(*seed, points);

  const double bound_d =
      cfg.bound_d > 0.0
          ? cfg.bound_d
          : 2.0 * std::sqrt(2.0) * (1.0 + std::sqrt(total_energy(phi_w, psi_w, phi_w, s + 1))) +
                1.0;

  const double extent = target.time_nodes[target.node_count() - 1];
  double t0 = cfg.window > 0.0 ? std::min(cfg.window, extent) : extent;

  NonlinearSolution ns;
  ns.bound_d = bound_d;
  ns.sobolev_index = s;

  WindowOutcome outcome;
  for (int attempt = 0;; ++attempt) {
    outcome = run_window(target_w, phi_w, psi_w, rg_w, t0, s, bound_d, cfg,
                         seed != nullptr ? &seed_w : nullptr, attempt == 0);
    ns.report.window_history.push_back(t0);
    if (outcome.converged || !cfg.adaptive || attempt >= cfg.max_halvings ||
        !outcome.needs_halving)
      break;
    t0 /= 2.0;
  }
  if (!outcome.have_solution)
    throw std::runtime_error("picard_solve: no linear sweep completed");

  ns.u = outcome.u;
  ns.ut = outcome.ut;
  ns.spectral = outcome.sol;
  ns.window = t0;
  ns.report.distances = outcome.distances;
  ns.report.ratios = outcome.ratios;
  ns.report.sup_norms = outcome.sup_norms;
  ns.report.energies = outcome.energies;
  ns.report.converged = outcome.converged;
  ns.report.bound_violated = outcome.bound_violated;
  ns.report.geometric_r2 = log_fit_r2(outcome.distances);

  const SpaceTimeField target_nodes = interpolate_time_nodes(target_w, ns.u.time_nodes);
  ns.residual = curvature_residual(ns.u, target_nodes, rg_w);
  ns.max_residual = max_interior_residual(ns.residual);

  if (cfg.measure_floor && outcome.converged) {
    PicardConfig refined = cfg;
    refined.dt /= 2.0;
    refined.measure_floor = false;
    refined.window = t0;
    refined.adaptive = false;
    const NonlinearSolution fine = picard_solve(target, phi, psi, r_g, refined, seed);
    ns.residual_floor = fine.max_residual;
    ns.residual_threshold = 10.0 * fine.max_residual;
  }
  return ns;
}

NonlinearSolution small_data_solve(const SpaceTimeField& target, const PicardConfig& cfg) {
  PicardConfig full = cfg;
  full.adaptive = false;
  full.window = 0.0;
  const GridField zero(target.grid);
  return picard_solve(target, zero, zero, zero, full);
}

AmplitudeSearch amplitude_search(const SpaceTimeField& shape, const PicardConfig& cfg,
                                 double start_amplitude, double amplitude_cap) {
  if (start_amplitude <= 0.0 || amplitude_cap < start_amplitude)
    throw std::invalid_argument("amplitude_search: bad amplitude range");
  AmplitudeSearch report;
  PicardConfig probe = cfg;
  probe.measure_floor = false;

  const auto converges = [&](double amp) {
    SpaceTimeField scaled = shape;
    scaled.values *= amp;
    ++report.solves;
    try {
      const NonlinearSolution sol = small_data_solve(scaled, probe);
      return sol.report.converged && !sol.report.bound_violated;
    } catch (const std::exception&) {
      return false;
    }
  };

  if (!converges(start_amplitude)) {
    report.first_failed = start_amplitude;
    return report;
  }
  report.last_convergent = start_amplitude;
  double amp = start_amplitude;
  while (amp < amplitude_cap) {
    amp = std::min(amp * 4.0, amplitude_cap * (1.0 + 1e-12));
    if (converges(amp)) {
      report.last_convergent = amp;
    } else {
      report.first_failed = amp;
      break;
    }
  }
  if (report.first_failed == 0.0) return report;  // never failed below the cap

  for (int round = 0; round < 5; ++round) {
    const double mid = std::sqrt(report.last_convergent * report.first_failed);
    if (converges(mid))
      report.last_convergent = mid;
    else
      report.first_failed = mid;
  }
  return report;
}

double c0_solution_gap(const GalerkinSolution& a, const GalerkinSolution& b) {
  if (a.basis.grid.dim() != b.basis.grid.dim())
    throw std::invalid_argument("c0_solution_gap: dimension mismatch");
  const int points = std::max({2 * a.basis.kmax + 2, 2 * b.basis.kmax + 2,
                               static_cast<int>(a.basis.grid.points_per_axis()),
                               static_cast<int>(b.basis.grid.points_per_axis())});
  const TorusGrid g(a.basis.grid.dim(), points);
  const SpaceTimeField ua = a.on_grid(g);
  const SpaceTimeField ub = b.on_grid(g);

  double sup = 0.0;
  int shared = 0;
  for (int ja = 0, jb = 0; ja < ua.node_count() && jb < ub.node_count();) {
    const double ta = ua.time_nodes[ja], tb = ub.time_nodes[jb];
    if (std::abs(ta - tb) < 1e-9 * std::max(1.0, std::abs(ta))) {
      sup = std::max(sup, (ua.values.col(ja) - ub.values.col(jb)).array().abs().maxCoeff());
      ++shared;
      ++ja;
      ++jb;
    } else if (ta < tb) {
      ++ja;
    } else {
      ++jb;
    }
  }
  if (shared < 2) throw std::invalid_argument("c0_solution_gap: times do not intersect");
  return sup;
}

UniquenessReport uniqueness_probe(const SpaceTimeField& target, const GridField& phi,
                                  const GridField& psi, const GridField& r_g,
                                  const PicardConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);

  const auto level = [&](const PicardConfig& base) {
    PicardConfig c = base;
    c.measure_floor = false;
    std::vector<GalerkinSolution> sols;
    sols.push_back(picard_solve(target, phi, psi, r_g, c).spectral);
    PicardConfig cut = c;
    cut.kmax *= 2;
    sols.push_back(picard_solve(target, phi, psi, r_g, cut).spectral);
    PicardConfig fine = c;
    fine.dt /= 2.0;
    sols.push_back(picard_solve(target, phi, psi, r_g, fine).spectral);
    const GridField w = random_band_limited(phi.grid, 2, 0.01, rng);
    sols.push_back(picard_solve(target, phi, psi, r_g, c, &w).spectral);
    return sols;
  };

  const auto gaps = [](const std::vector<GalerkinSolution>& sols) {
    Eigen::VectorXd g(6);
    int idx = 0;
    for (std::size_t i = 0; i < sols.size(); ++i)
      for (std::size_t j = i + 1; j < sols.size(); ++j)
        g[idx++] = c0_solution_gap(sols[i], sols[j]);
    return g;
  };

  UniquenessReport report;
  report.coarse_gaps = gaps(level(cfg));
  PicardConfig refined = cfg;
  refined.kmax *= 2;
  refined.dt /= 2.0;
  report.refined_gaps = gaps(level(refined));
  report.coarse_max = report.coarse_gaps.maxCoeff();
  report.refined_max = report.refined_gaps.maxCoeff();
  report.shrinking = report.refined_max < report.coarse_max || report.refined_max < 1e-8;
  return report;
}

}  // namespace curveforge
