// Acceptance gate for the deformation workbench. Nine end-to-end criteria,
// each printed as a single pass/fail line with its measured values and wall
// time; the process exits nonzero if any criterion fails. Every tolerance and
// runtime budget is pinned here in code.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "curveforge/curvature.hpp"
#include "curveforge/energy.hpp"
#include "curveforge/galerkin.hpp"
#include "curveforge/picard.hpp"
#include "curveforge/spectral.hpp"

using namespace curveforge;

namespace {

int criteria_passed = 0;
int criteria_total = 0;

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// One line per criterion: index, description, verdict, elapsed, key numbers.
void report(int index, const char* label, bool pass, double seconds, const std::string& detail) {
  ++criteria_total;
  if (pass) ++criteria_passed;
  std::printf("[%d/9] %-58s %s  %6.1fs  %s\n", index, label, pass ? "PASS" : "FAIL", seconds,
              detail.c_str());
  std::fflush(stdout);
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}

// Energy traces of the convergent nonlinear runs, revisited by criterion 8.
struct RecordedTrace {
  std::string name;
  EnergyTrace trace;
  double a_s = 0.0;
};
std::vector<RecordedTrace> convergent_traces;

// --------------------------------------------------------------------------
// 1. Scalar curvature: the finite-difference oracle against the closed form,
//    second-order ladders in three factor dimensions.
// --------------------------------------------------------------------------
bool criterion_1() {
  const double start = now_seconds();
  constexpr double kBudgetSeconds = 60.0;
  constexpr double kMinRatio = 3.0;
  constexpr double kFinalGap11 = 1e-3;

  struct Case {
    int m, n;
    std::array<int, 3> ladder;
    double (*u)(const double*);
  };
  const Case cases[] = {
      {1, 1, {32, 64, 128}, [](const double* x) { return 0.3 * std::sin(x[0]) * std::cos(x[1]); }},
      {2, 1, {16, 32, 64},
       [](const double* x) { return 0.3 * std::sin(x[0]) * std::cos(x[1]) * std::cos(x[2]); }},
      {2, 2, {8, 16, 32},
       [](const double* x) { return 0.3 * std::sin(x[0]) * std::cos(x[1]) * std::sin(x[2] + x[3]); }}};

  bool pass = true;
  double min_ratio = 1e300, final_11 = 0.0;
  for (const Case& c : cases) {
    std::array<double, 3> errors{};
    for (int i = 0; i < 3; ++i) {
      ProductManifoldSpec spec;
      spec.m = c.m;
      spec.n = c.n;
      spec.points_per_axis = c.ladder[i];
      errors[i] = max_curvature_gap(spec, sample(spec.product_grid(), c.u).samples);
    }
    for (int i = 1; i < 3; ++i) {
      const double ratio = errors[i - 1] / std::max(errors[i], 1e-300);
      min_ratio = std::min(min_ratio, ratio);
      pass = pass && ratio >= kMinRatio;
    }
    if (c.m == 1 && c.n == 1) {
      final_11 = errors[2];
      pass = pass && final_11 <= kFinalGap11;
    }
  }

  const double elapsed = now_seconds() - start;
  pass = pass && elapsed < kBudgetSeconds;
  report(1, "curvature oracle vs closed form: second-order ladders", pass, elapsed,
         "min ratio " + sci(min_ratio) + ", finest circle-case gap " + sci(final_11));
  return pass;
}

// --------------------------------------------------------------------------
// 2. Christoffel symbols: every closed-form family against finite
//    differences, raising consistency, and the vanishing mixed trace.
// --------------------------------------------------------------------------
bool criterion_2() {
  const double start = now_seconds();
  constexpr double kBudgetSeconds = 10.0;
  constexpr double kTraceTol = 1e-10;
  constexpr double kMinRatio = 3.0;

  struct Gaps {
    double trace = 0.0, raise = 0.0, fd = 0.0;
  };
  const auto run = [](int m, int n, int points) {
    ProductManifoldSpec spec;
    spec.m = m;
    spec.n = n;
    spec.points_per_axis = points;
    spec.interval_length = 1.2;
    const ProductGrid pg = spec.product_grid();
    const Array u = sample(pg, [m, n](const double* x) {
                      double v = 0.21 * std::sin(x[0]);
                      for (int a = 1; a < m; ++a) v *= std::cos(x[a]);
                      for (int a = 0; a < n; ++a)
                        v *= (n == 1) ? std::cos(x[m]) : std::sin(x[m + a] + 0.3);
                      return v;
                    }).samples;
    const DeformedMetric dm = assemble_deformed_metric(spec, u);
    const DeformationDerivs derivs = deformation_derivs(spec, u);
    const auto mask = interior_mask(pg, 2);
    const int d = pg.dim();

    Gaps gaps;
    for (std::size_t p = 0; p < pg.total_points(); ++p) {
      if (!mask[static_cast<Eigen::Index>(p)]) continue;
      const ChristoffelPoint closed = christoffel_closed_form_point(spec, derivs, p);
      gaps.trace = std::max(gaps.trace, christoffel_trace_residual(closed));

      for (int A = 0; A < d; ++A)
        for (int B = 0; B < d; ++B)
          for (int C = 0; C < d; ++C) {
            double raised = 0.0;
            for (int D = 0; D < d; ++D)
              raised += dm.metric.inverse_component(p, A, D) * closed.lowered[B][C][D];
            gaps.raise = std::max(gaps.raise, std::abs(raised - closed.raised[A][B][C]));
          }

      if (p % 3 == 0) {  // subsample the FD route; it dominates the runtime
        const ChristoffelPoint fd = christoffel_fd_point(dm.metric, p);
        for (int A = 0; A < d; ++A)
          for (int B = 0; B < d; ++B)
            for (int C = 0; C < d; ++C) {
              gaps.fd = std::max(gaps.fd, std::abs(fd.raised[A][B][C] - closed.raised[A][B][C]));
              gaps.fd = std::max(gaps.fd, std::abs(fd.lowered[A][B][C] - closed.lowered[A][B][C]));
            }
      }
    }
    return gaps;
  };

  bool pass = true;
  double worst_trace = 0.0, min_ratio = 1e300;
  const int cases[4][3] = {{1, 1, 16}, {2, 1, 12}, {1, 2, 8}, {2, 2, 8}};
  for (const auto& c : cases) {
    const Gaps coarse = run(c[0], c[1], c[2]);
    const Gaps fine = run(c[0], c[1], 2 * c[2]);
    worst_trace = std::max({worst_trace, coarse.trace, fine.trace, coarse.raise, fine.raise});
    const double ratio = coarse.fd / std::max(fine.fd, 1e-300);
    min_ratio = std::min(min_ratio, ratio);
    pass = pass && coarse.trace <= kTraceTol && fine.trace <= kTraceTol &&
           coarse.raise <= kTraceTol && fine.raise <= kTraceTol && ratio >= kMinRatio;
  }

  const double elapsed = now_seconds() - start;
  pass = pass && elapsed < kBudgetSeconds;
  report(2, "Christoffel families: finite differences and trace identity", pass, elapsed,
         "worst identity residual " + sci(worst_trace) + ", min FD ratio " + sci(min_ratio));
  return pass;
}

// --------------------------------------------------------------------------
// 3. Linear integrator: manufactured variable-coefficient solution
//    u*(x,t) = cos(t) sin(x) recovered in C0 on [0,1] x T^1.
// --------------------------------------------------------------------------
bool criterion_3() {
  const double start = now_seconds();
  constexpr double kBudgetSeconds = 30.0;
  constexpr double kRecoveryTol = 5e-5;

  const TorusGrid g(1, 32);
  const Eigen::VectorXd nodes = uniform_nodes(0.0, 1.0, 1001);
  LinearProblem p;
  p.grid = g;
  p.damping =
      sample_spacetime(g, nodes, [](const double* x, double) { return 0.1 * std::cos(x[0]); });
  p.stiffness = sample_spacetime(g, nodes,
                                 [](const double* x, double) { return 1.0 + 0.2 * std::sin(x[0]); });
  p.gradient_coupling =
      sample_spacetime(g, nodes, [](const double* x, double) { return 0.05 * std::sin(x[0]); });
  p.potential = sample_spacetime(g, nodes, [](const double*, double) { return 0.1; });
  p.forcing = sample_spacetime(g, nodes, [](const double* x, double t) {
    const double s = std::sin(x[0]), c = std::cos(x[0]);
    const double u = std::cos(t) * s, ut = -std::sin(t) * s, utt = -std::cos(t) * s;
    const double ux = std::cos(t) * c, lap = -std::cos(t) * s;
    return utt + 0.1 * c * ut - (1.0 + 0.2 * s) * lap - 0.05 * c * ux - 0.1 * u;
  });
  p.initial_value = sample(g, [](const double* x) { return std::sin(x[0]); });
  p.initial_velocity = GridField(g);

  IntegrateOptions opts;
  opts.kmax = 8;
  opts.dt = 1e-3;
  const GalerkinSolution sol = integrate_at_cutoff(p, opts);
  const SpaceTimeField approx = sol.on_grid(g);

  double err = 0.0;
  for (int j = 0; j < approx.node_count(); ++j) {
    const double ct = std::cos(sol.times[static_cast<std::size_t>(j)]);
    for (int q = 0; q < static_cast<int>(g.total_points()); ++q) {
      const double x = 2.0 * std::numbers::pi * q / g.points_per_axis();
      err = std::max(err, std::abs(approx.values(q, j) - ct * std::sin(x)));
    }
  }

  const double elapsed = now_seconds() - start;
  const bool pass = err <= kRecoveryTol && elapsed < kBudgetSeconds;
  report(3, "linear integrator recovers a manufactured solution", pass, elapsed,
         "C0 recovery error " + sci(err));
  return pass;
}

// --------------------------------------------------------------------------
// 4. Nonlinear solver: the curvature target realized by
//    u*(x,t) = 0.2 sin(x) sin(t) is handed back and u* recovered, with
//    contracting iterates on a clean geometric decay.
// --------------------------------------------------------------------------
bool criterion_4() {
  const double start = now_seconds();
  constexpr double kBudgetSeconds = 120.0;
  constexpr double kRecoveryTol = 1e-4;
  constexpr double kR2Floor = 0.95;

  const TorusGrid g(1, 32);
  const SpaceTimeField target =
      sample_spacetime(g, uniform_nodes(0.0, 0.5, 501), [](const double* x, double t) {
        const double u = 0.2 * std::sin(x[0]) * std::sin(t);
        const double gsq = std::pow(0.2 * std::cos(x[0]) * std::sin(t), 2);
        const double ut2 = std::pow(0.2 * std::sin(x[0]) * std::cos(t), 2);
        const double down = std::exp(-2.0 * u), up = std::exp(2.0 * u);
        return -2.0 * down * u + 2.0 * up * u - 4.0 * down * gsq - 4.0 * up * ut2;
      });
  const GridField phi(g);
  const GridField psi = sample(g, [](const double* x) { return 0.2 * std::sin(x[0]); });

  PicardConfig pc;
  const NonlinearSolution sol = picard_solve(target, phi, psi, GridField(g), pc);

  double recovery = 0.0;
  for (int j = 0; j < sol.u.node_count(); ++j) {
    const double st = std::sin(sol.u.time_nodes[j]);
    for (int q = 0; q < static_cast<int>(sol.u.grid.total_points()); ++q) {
      const double x = 2.0 * std::numbers::pi * q / sol.u.grid.points_per_axis();
      recovery = std::max(recovery, std::abs(sol.u.values(q, j) - 0.2 * std::sin(x) * st));
    }
  }
  double worst_ratio = 0.0;
  for (double r : sol.report.ratios) worst_ratio = std::max(worst_ratio, r);

  if (sol.report.converged && !sol.report.energies.empty())
    convergent_traces.push_back({"manufactured recovery", sol.report.energies.back(),
                                 data_quantity(target, sol.sobolev_index)});

  const double elapsed = now_seconds() - start;
  const bool pass = sol.report.converged && recovery <= kRecoveryTol && worst_ratio < 1.0 &&
                    sol.report.geometric_r2 > kR2Floor && elapsed < kBudgetSeconds;
  report(4, "nonlinear solver recovers a manufactured deformation", pass, elapsed,
         "recovery " + sci(recovery) + ", max ratio " + sci(worst_ratio) + ", r2 " +
             sci(sol.report.geometric_r2));
  return pass;
}

// --------------------------------------------------------------------------
// 5. Small targets on the full interval: one window, residual at the
//    discretization floor, energy under the automatic iterate bound.
// --------------------------------------------------------------------------
bool criterion_5() {
  const double start = now_seconds();
  constexpr double kBudgetSeconds = 120.0;

  const TorusGrid g(1, 16);
  const SpaceTimeField target =
      sample_spacetime(g, uniform_nodes(0.0, 1.0, 1001), [](const double* x, double t) {
        return 1e-3 * std::sin(x[0]) * std::sin(t);
      });
  PicardConfig pc;
  const NonlinearSolution sol = small_data_solve(target, pc);

  const double max_sqrt_e =
      sol.report.energies.empty() ? 0.0 : sol.report.energies.back().sqrt_energy.maxCoeff();
  const double energy_cap = sol.bound_d / (2.0 * std::sqrt(2.0));

  if (sol.report.converged && !sol.report.energies.empty())
    convergent_traces.push_back({"small-data full interval", sol.report.energies.back(),
                                 data_quantity(target, sol.sobolev_index)});

  const double elapsed = now_seconds() - start;
  const bool pass = sol.report.converged && sol.report.window_history.size() == 1 &&
                    sol.window >= 1.0 - 1e-12 && sol.max_residual <= sol.residual_threshold &&
                    max_sqrt_e <= energy_cap && elapsed < kBudgetSeconds;
  report(5, "small target solves the full interval in one window", pass, elapsed,
         "residual " + sci(sol.max_residual) + " <= " + sci(sol.residual_threshold) +
             ", sqrt(E) " + sci(max_sqrt_e) + " <= " + sci(energy_cap));
  return pass;
}

// --------------------------------------------------------------------------
// 6. Spatially constant targets: the field equation collapses to the
//    ordinary equation 2m e^{2mu} u_tt + m(3m+1) e^{2mu} u_t^2 = -target(t);
//    the solver must match a high-accuracy integration of that reduction.
// --------------------------------------------------------------------------
bool criterion_6() {
  const double start = now_seconds();
  constexpr double kBudgetSeconds = 30.0;
  constexpr double kMatchTol = 1e-5;

  const TorusGrid g(1, 16);
  const double t_end = 0.5;
  const int solver_nodes = 501;
  const SpaceTimeField target =
      sample_spacetime(g, uniform_nodes(0.0, t_end, solver_nodes),
                       [](const double*, double t) { return 0.1 * std::cos(t); });
  PicardConfig pc;
  const NonlinearSolution sol = picard_solve(target, GridField(g), GridField(g), GridField(g), pc);

  // Reference: y'' = -0.05 cos(t) e^{-2y} - 2 (y')^2, classical RK4 on a grid
  // one hundred times finer than the solver's.
  const auto accel = [](double t, double y, double w) {
    return -0.05 * std::cos(t) * std::exp(-2.0 * y) - 2.0 * w * w;
  };
  const int refine = 100;
  const double h = t_end / ((solver_nodes - 1) * refine);
  double y = 0.0, w = 0.0;
  std::vector<double> reference = {0.0};
  for (int step = 0; step < (solver_nodes - 1) * refine; ++step) {
    const double t = step * h;
    const double k1y = w, k1w = accel(t, y, w);
    const double k2y = w + 0.5 * h * k1w;
    const double k2w = accel(t + 0.5 * h, y + 0.5 * h * k1y, w + 0.5 * h * k1w);
    const double k3y = w + 0.5 * h * k2w;
    const double k3w = accel(t + 0.5 * h, y + 0.5 * h * k2y, w + 0.5 * h * k2w);
    const double k4y = w + h * k3w;
    const double k4w = accel(t + h, y + h * k3y, w + h * k3w);
    y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
    if ((step + 1) % refine == 0) reference.push_back(y);
  }

  double worst = 0.0;
  const bool node_match = sol.report.converged && sol.u.node_count() == solver_nodes;
  if (node_match)
    for (int j = 0; j < solver_nodes; ++j)
      worst = std::max(worst, (sol.u.values.col(j).array() - reference[j]).abs().maxCoeff());

  if (sol.report.converged && !sol.report.energies.empty())
    convergent_traces.push_back({"ordinary-equation reduction", sol.report.energies.back(),
                                 data_quantity(target, sol.sobolev_index)});

  const double elapsed = now_seconds() - start;
  const bool pass = node_match && worst <= kMatchTol && elapsed < kBudgetSeconds;
  report(6, "constant targets match the ordinary-equation reduction", pass, elapsed,
         "gap to reference integration " + sci(worst));
  return pass;
}

// --------------------------------------------------------------------------
// 7. Uniqueness probes: doubled cutoff, halved step, and re-seeded iteration
//    land on one solution for both nonlinear test problems, with gaps that
//    shrink under refinement.
// --------------------------------------------------------------------------
bool criterion_7() {
  const double start = now_seconds();
  constexpr double kBudgetSeconds = 300.0;
  constexpr double kGapTol = 1e-4;

  const TorusGrid g_local(1, 32);
  const SpaceTimeField local_target =
      sample_spacetime(g_local, uniform_nodes(0.0, 0.5, 501), [](const double* x, double t) {
        const double u = 0.2 * std::sin(x[0]) * std::sin(t);
        const double gsq = std::pow(0.2 * std::cos(x[0]) * std::sin(t), 2);
        const double ut2 = std::pow(0.2 * std::sin(x[0]) * std::cos(t), 2);
        return -2.0 * std::exp(-2.0 * u) * u + 2.0 * std::exp(2.0 * u) * u -
               4.0 * std::exp(-2.0 * u) * gsq - 4.0 * std::exp(2.0 * u) * ut2;
      });
  const GridField psi = sample(g_local, [](const double* x) { return 0.2 * std::sin(x[0]); });
  PicardConfig pc_local;
  pc_local.measure_floor = false;
  const UniquenessReport local = uniqueness_probe(local_target, GridField(g_local), psi,
                                                  GridField(g_local), pc_local);

  const TorusGrid g_small(1, 16);
  const SpaceTimeField small_target =
      sample_spacetime(g_small, uniform_nodes(0.0, 1.0, 1001), [](const double* x, double t) {
        return 1e-3 * std::sin(x[0]) * std::sin(t);
      });
  PicardConfig pc_small;
  pc_small.measure_floor = false;
  pc_small.window = 0.0;
  pc_small.adaptive = false;
  const GridField zero(g_small);
  const UniquenessReport small = uniqueness_probe(small_target, zero, zero, zero, pc_small);

  const double elapsed = now_seconds() - start;
  const bool pass = local.coarse_max <= kGapTol && local.refined_max <= kGapTol &&
                    local.shrinking && small.coarse_max <= kGapTol &&
                    small.refined_max <= kGapTol && small.shrinking && elapsed < kBudgetSeconds;
  report(7, "refined and re-seeded solves agree pairwise", pass, elapsed,
         "gaps " + sci(local.coarse_max) + " -> " + sci(local.refined_max) + " and " +
             sci(small.coarse_max) + " -> " + sci(small.refined_max));
  return pass;
}

// --------------------------------------------------------------------------
// 8. Energy layer: every convergent run above sits under its own growth
//    envelope, and the two discrete forms of the equation agree pointwise on
//    random smooth fields.
// --------------------------------------------------------------------------
bool criterion_8() {
  const double start = now_seconds();
  constexpr double kBudgetSeconds = 10.0;
  constexpr double kIdentityTol = 1e-9;

  bool envelopes = !convergent_traces.empty();
  double worst_margin = -1e300;
  for (const RecordedTrace& rt : convergent_traces) {
    const GronwallReport gw = gronwall_check(rt.trace, rt.a_s);
    envelopes = envelopes && gw.pass;
    worst_margin = std::max(worst_margin, gw.worst_margin);
  }

  // m u_tt - e^{-2(m+1)u} lap(u) - F(u,u) = -(e^{-2mu}/2) * residual, with all
  // derivatives taken by the same discrete operators on both sides.
  std::mt19937_64 rng(6);
  double worst_identity = 0.0;
  for (int m : {1, 2}) {
    const TorusGrid g(m, m == 1 ? 32 : 12);
    const Eigen::VectorXd nodes = uniform_nodes(0.0, 0.5, 6);
    const GridField f1 = random_band_limited(g, 3, 0.4, rng);
    const GridField f2 = random_band_limited(g, 3, 0.3, rng);
    SpaceTimeField u(g, nodes);
    for (int j = 0; j < u.node_count(); ++j) {
      GridField slice(g);
      slice.samples = f1.samples * std::cos(2.0 * nodes[j]) + f2.samples * (std::sin(nodes[j]) + 0.3);
      u.set_node(j, slice);
    }
    const SpaceTimeField target = sample_spacetime(
        g, nodes, [](const double* x, double t) { return 0.4 * std::cos(x[0] - t); });
    const GridField rg = sample(g, [](const double* x) { return 0.2 * std::sin(x[0]); });

    const SpaceTimeField utt = time_derivative(u, 2);
    const SpaceTimeField f_uu = nonlinear_rhs(u, u, target, rg);
    const SpaceTimeField res = curvature_residual(u, target, rg);
    for (int j = 0; j < u.node_count(); ++j) {
      const Array lap = laplacian(u.at_node(j)).samples;
      const Array eu = u.values.col(j).array();
      const Array lhs = m * utt.values.col(j).array() - (-2.0 * (m + 1.0) * eu).exp() * lap -
                        f_uu.values.col(j).array();
      const Array rhs = -0.5 * (-2.0 * m * eu).exp() * res.values.col(j).array();
      worst_identity = std::max(worst_identity, (lhs - rhs).abs().maxCoeff());
    }
  }

  const double elapsed = now_seconds() - start;
  const bool pass = envelopes && worst_identity <= kIdentityTol && elapsed < kBudgetSeconds;
  report(8, "growth envelopes hold; the two equation forms agree", pass, elapsed,
         std::to_string(convergent_traces.size()) + " traces, worst margin " + sci(worst_margin) +
             ", identity gap " + sci(worst_identity));
  return pass;
}

// --------------------------------------------------------------------------
// 9. Norm layer: Parseval, transform round-trip, and the three bounded-ratio
//    sweeps (product, gradient pairing, composition) over 200 random fields
//    each, stable under grid doubling.
// --------------------------------------------------------------------------
bool criterion_9() {
  const double start = now_seconds();
  constexpr double kBudgetSeconds = 30.0;
  constexpr int kSobolev = 2;
  constexpr int kBand = 7;

  std::mt19937_64 rng(20240901);
  double parseval = 0.0, roundtrip = 0.0;
  for (int m : {1, 2, 3}) {
    const TorusGrid g(m, 16);
    for (int trial = 0; trial < 5; ++trial) {
      const GridField f = random_band_limited(g, 5, 1.0, rng);
      parseval = std::max(parseval, std::abs(sobolev_norm(f, 0) - l2_norm(f)));
      const GridField back = inverse_transform(forward_transform(f));
      roundtrip = std::max(roundtrip, (back.samples - f.samples).abs().maxCoeff());
    }
  }

  // Ratio of the measured quantity to its claimed bound; every draw must stay
  // below one, and the maximum must not double when the grid is refined.
  enum Sweep { kProduct, kPairing, kComposition };
  const auto max_ratio = [&rng](Sweep sweep, int points, bool& all_below_one) {
    const TorusGrid g(1, points);
    double worst = 0.0;
    const int draws = sweep == kComposition ? 200 : 100;  // 200 fields per sweep
    for (int i = 0; i < draws; ++i) {
      double ratio = 0.0;
      if (sweep == kComposition) {
        const GridField w = random_band_limited(g, kBand, 0.5, rng);
        GridField fw = w;
        fw.samples = (2.0 * w.samples).exp() - 1.0;
        const double nu = c0_norm(w);
        const double profile = std::pow(2.0, kSobolev) * std::exp(2.0 * nu);
        ratio = sobolev_norm(fw, kSobolev) /
                (profile * (1.0 + std::pow(nu, kSobolev)) * sobolev_norm(w, kSobolev));
      } else {
        const GridField f = random_band_limited(g, kBand, 1.0, rng);
        const GridField h = random_band_limited(g, kBand, 1.0, rng);
        if (sweep == kProduct) {
          GridField p = f;
          p.samples *= h.samples;
          const double rhs =
              c0_norm(f) * sobolev_norm(h, kSobolev) + sobolev_norm(f, kSobolev) * c0_norm(h);
          ratio = sobolev_norm(p, kSobolev) / rhs;
        } else {
          GridField q(g);
          for (int a = 0; a < g.dim(); ++a)
            q.samples += partial_derivative(f, a, 1).samples * partial_derivative(h, a, 1).samples;
          const double rhs = ck_norm(f, 1) * sobolev_norm(h, kSobolev + 1) +
                             sobolev_norm(f, kSobolev + 1) * ck_norm(h, 1);
          ratio = sobolev_norm(q, kSobolev) / rhs;
        }
      }
      all_below_one = all_below_one && ratio < 1.0;
      worst = std::max(worst, ratio);
    }
    return worst;
  };

  bool bounded = true, stable = true;
  double worst_sweep = 0.0;
  for (Sweep sweep : {kProduct, kPairing, kComposition}) {
    const double coarse = max_ratio(sweep, 32, bounded);
    const double fine = max_ratio(sweep, 64, bounded);
    stable = stable && fine < 2.0 * coarse;
    worst_sweep = std::max({worst_sweep, coarse, fine});
  }

  const double elapsed = now_seconds() - start;
  const bool pass = parseval <= 1e-10 && roundtrip <= 1e-12 && bounded && stable &&
                    elapsed < kBudgetSeconds;
  report(9, "norm layer: Parseval, round-trip, bounded-ratio sweeps", pass, elapsed,
         "parseval " + sci(parseval) + ", round-trip " + sci(roundtrip) + ", worst ratio " +
             sci(worst_sweep));
  return pass;
}

}  // namespace

int main() {
  bool all = true;
  all &= criterion_1();
  all &= criterion_2();
  all &= criterion_3();
  all &= criterion_4();
  all &= criterion_5();
  all &= criterion_6();
  all &= criterion_7();
  all &= criterion_8();
  all &= criterion_9();
  std::printf("acceptance: %d/%d criteria pass\n", criteria_passed, criteria_total);
  return all ? 0 : 1;
}
