// Nonlinear solver checks: frozen coefficient values, the operator identity
// behind the linearization, algebraic consistency of the two equation forms,
// a cross-module curvature comparison, and solver oracles (trivial, ODE
// reduction, manufactured recovery, small-data regime, uniqueness probes).
#include <cmath>
#include <numbers>
#include <random>

#include "curveforge/curvature.hpp"
#include "curveforge/picard.hpp"
#include "curveforge/spectral.hpp"
#include "doctest.h"

using namespace curveforge;

namespace {

SpaceTimeField combine_modes(const TorusGrid& g, const Eigen::VectorXd& nodes,
                             const GridField& f1, const GridField& f2) {
  SpaceTimeField u(g, nodes);
  for (int j = 0; j < u.node_count(); ++j) {
    const double t = nodes[j];
    GridField slice(g);
    slice.samples = f1.samples * std::cos(2.0 * t) + f2.samples * (std::sin(t) + 0.3);
    u.set_node(j, slice);
  }
  return u;
}

// <grad a, grad b> of one time node, spectral.
Array node_gradient_dot(const GridField& a, const GridField& b) {
  const auto ga = gradient(a);
  const auto gb = gradient(b);
  Array acc = Array::Zero(a.samples.size());
  for (std::size_t ax = 0; ax < ga.size(); ++ax) acc += ga[ax].samples * gb[ax].samples;
  return acc;
}

double manufactured_u(const double* x, double t) { return 0.2 * std::sin(x[0]) * std::sin(t); }

// Closed-form curvature target realized by manufactured_u for m = 1.
double manufactured_target(const double* x, double t) {
  const double u = manufactured_u(x, t);
  const double gsq = std::pow(0.2 * std::cos(x[0]) * std::sin(t), 2);
  const double ut2 = std::pow(0.2 * std::sin(x[0]) * std::cos(t), 2);
  const double down = std::exp(-2.0 * u), up = std::exp(2.0 * u);
  // lap u = -u and u_tt = -u for this profile.
  return 2.0 * down * (-u) - 2.0 * up * (-u) - 4.0 * down * gsq - 4.0 * up * ut2;
}

}  // namespace

TEST_CASE("frozen nonlinearity vanishes on trivial input and collapses at zero background") {
  const TorusGrid g(1, 16);
  const Eigen::VectorXd nodes = uniform_nodes(0.0, 0.4, 5);
  const SpaceTimeField zero(g, nodes);
  const GridField zero_rg(g);

  const SpaceTimeField f0 = nonlinear_rhs(zero, zero, zero, zero_rg);
  CHECK(f0.values.array().abs().maxCoeff() == 0.0);

  // v = 0: F = (r_g - target) / 2 regardless of u.
  const SpaceTimeField u = sample_spacetime(
      g, nodes, [](const double* x, double t) { return 0.2 * std::cos(x[0] + t); });
  const SpaceTimeField target = sample_spacetime(
      g, nodes, [](const double* x, double t) { return 0.3 * std::sin(x[0]) * std::cos(t); });
  const GridField rg = sample(g, [](const double* x) { return 0.1 + 0.05 * std::cos(x[0]); });
  const SpaceTimeField f = nonlinear_rhs(u, zero, target, rg);
  for (int j = 0; j < f.node_count(); ++j) {
    const Array want = 0.5 * (rg.samples - target.values.col(j).array());
    CHECK((f.values.col(j).array() - want).abs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("linearization at zero background freezes the constant coefficients") {
  for (int points : {16, 12}) {
    const int m = points == 16 ? 1 : 2;
    const TorusGrid g(m, points);
    const Eigen::VectorXd nodes = uniform_nodes(0.0, 0.3, 4);
    const SpaceTimeField zero(g, nodes);
    SpaceTimeField target(g, nodes);
    target.values.setConstant(0.3);
    GridField rg(g);
    rg.samples.setConstant(0.1);

    const LinearCoefficients lc = linearize_step(zero, target, rg);
    CHECK(lc.damping.values.array().abs().maxCoeff() == 0.0);
    CHECK(lc.stiffness.values.array().isApproxToConstant(1.0 / m, 1e-14));
    const double beta = (m * m + m + 2.0) / (4.0 * m * (m + 1.0));
    CHECK(lc.gradient_coupling.values.array().isApproxToConstant(beta, 1e-14));
    CHECK(lc.potential.values.array().abs().maxCoeff() == 0.0);
    CHECK(lc.forcing.values.array().isApproxToConstant((0.1 - 0.3) / (2.0 * m), 1e-14));
  }
}

TEST_CASE("linear coefficients reproduce the frozen operator pointwise") {
  // m u_tt - e^{-2(m+1)v} lap u - F(u, v) must equal
  // m (u_tt + a u_t - alpha lap u - <grad beta, grad u> - gamma u - f).
  for (int m : {1, 2}) {
    // The sampled coupling coefficient must itself be spectrally resolved for
    // the pointwise comparison, so keep 32 points per axis in both dimensions.
    const TorusGrid g(m, 32);
    const Eigen::VectorXd nodes = uniform_nodes(0.0, 0.4, 5);
    const SpaceTimeField v = sample_spacetime(
        g, nodes, [](const double* x, double) { return 0.3 * std::sin(x[0]); });
    std::mt19937_64 rng(5);
    const SpaceTimeField u =
        combine_modes(g, nodes, random_band_limited(g, 3, 0.4, rng),
                      random_band_limited(g, 3, 0.3, rng));
    const SpaceTimeField target = sample_spacetime(
        g, nodes, [](const double* x, double t) { return 0.2 * std::sin(x[0]) * std::cos(t) + 0.05; });
    const GridField rg = sample(g, [](const double* x) { return 0.3 + 0.1 * std::cos(x[0]); });

    const SpaceTimeField utt = time_derivative(u, 2);
    const SpaceTimeField ut = time_derivative(u, 1);
    const SpaceTimeField f_uv = nonlinear_rhs(u, v, target, rg);
    const LinearCoefficients lc = linearize_step(v, target, rg);

    double worst = 0.0;
    for (int j = 0; j < u.node_count(); ++j) {
      const Array lap = laplacian(u.at_node(j)).samples;
      const Array ev = (-2.0 * (m + 1.0) * v.values.col(j).array());
      const Array lhs = m * utt.values.col(j).array() - ev.exp() * lap - f_uv.values.col(j).array();
      const Array coupling = node_gradient_dot(lc.gradient_coupling.at_node(j), u.at_node(j));
      const Array rhs =
          m * (utt.values.col(j).array() + lc.damping.values.col(j).array() * ut.values.col(j).array() -
               lc.stiffness.values.col(j).array() * lap - coupling -
               lc.potential.values.col(j).array() * u.values.col(j).array() -
               lc.forcing.values.col(j).array());
      worst = std::max(worst, (lhs - rhs).abs().maxCoeff());
    }
    CAPTURE(m);
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("the two forms of the equation agree algebraically") {
  // m u_tt - e^{-2(m+1)u} lap u - F(u,u) = -(e^{-2mu}/2) * residual, with all
  // derivatives evaluated by the same discrete operators.
  std::mt19937_64 rng(6);
  for (int m : {1, 2}) {
    const TorusGrid g(m, m == 1 ? 32 : 12);
    const Eigen::VectorXd nodes = uniform_nodes(0.0, 0.5, 6);
    const SpaceTimeField u = combine_modes(g, nodes, random_band_limited(g, 3, 0.4, rng),
                                           random_band_limited(g, 3, 0.3, rng));
    const SpaceTimeField target = sample_spacetime(
        g, nodes, [](const double* x, double t) { return 0.4 * std::cos(x[0] - t); });
    const GridField rg = sample(g, [](const double* x) { return 0.2 * std::sin(x[0]); });

    const SpaceTimeField utt = time_derivative(u, 2);
    const SpaceTimeField f_uu = nonlinear_rhs(u, u, target, rg);
    const SpaceTimeField res = curvature_residual(u, target, rg);

    double worst = 0.0;
    for (int j = 0; j < u.node_count(); ++j) {
      const Array lap = laplacian(u.at_node(j)).samples;
      const Array eu = u.values.col(j).array();
      const Array lhs =
          m * utt.values.col(j).array() - (-2.0 * (m + 1.0) * eu).exp() * lap - f_uu.values.col(j).array();
      const Array rhs = -0.5 * (-2.0 * m * eu).exp() * res.values.col(j).array();
      worst = std::max(worst, (lhs - rhs).abs().maxCoeff());
    }
    CAPTURE(m);
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("spatially constant deformations have an exact realized curvature") {
  // u = 0.1 t^2: the second-order time stencils are exact on quadratics, so
  // realized = -2m e^{2mu} u_tt - m(3m+1) e^{2mu} u_t^2 holds to rounding.
  const TorusGrid g(1, 8);
  const Eigen::VectorXd nodes = uniform_nodes(0.0, 1.0, 11);
  const SpaceTimeField u =
      sample_spacetime(g, nodes, [](const double*, double t) { return 0.1 * t * t; });
  const SpaceTimeField zero(g, nodes);
  const SpaceTimeField res = curvature_residual(u, zero, GridField(g));
  for (int j = 1; j + 1 < res.node_count(); ++j) {
    const double t = nodes[j];
    const double e = std::exp(0.2 * t * t);
    const double want = -2.0 * e * 0.2 - 4.0 * e * std::pow(0.2 * t, 2);
    CHECK(res.values(3, j) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("realized curvature matches the product-manifold formula route") {
  const int points = 32;
  const TorusGrid g(1, points);
  const Eigen::VectorXd nodes = uniform_nodes(0.0, 1.0, points + 1);
  const SpaceTimeField u = sample_spacetime(
      g, nodes, [](const double* x, double t) { return 0.3 * std::sin(x[0]) * std::cos(t); });
  const SpaceTimeField realized = curvature_residual(u, SpaceTimeField(g, nodes), GridField(g));

  ProductManifoldSpec spec;
  spec.m = 1;
  spec.n = 1;
  spec.points_per_axis = points;
  spec.interval_length = 1.0;
  Array u_prod(spec.product_grid().total_points());
  for (int i = 0; i < points; ++i)
    for (int j = 0; j <= points; ++j) u_prod[i * (points + 1) + j] = u.values(i, j);
  const Array formula = scalar_curvature_formula(spec, u_prod);

  double worst = 0.0;
  for (int i = 0; i < points; ++i)
    for (int j = 1; j < points; ++j)
      worst = std::max(worst,
                       std::abs(realized.values(i, j) - formula[i * (points + 1) + j]));
  CHECK(worst < 1e-9);
}

TEST_CASE("zero target with zero data converges immediately to zero") {
  const TorusGrid g(1, 16);
  const SpaceTimeField target(g, uniform_nodes(0.0, 0.5, 251));
  PicardConfig cfg;
  cfg.dt = 2e-3;
  cfg.measure_floor = false;
  const NonlinearSolution sol = small_data_solve(target, cfg);
  CHECK(sol.report.converged);
  CHECK(sol.report.distances.size() == 1);
  CHECK(sol.report.distances[0] == 0.0);
  CHECK(sol.u.values.array().abs().maxCoeff() == 0.0);
  CHECK(sol.max_residual == 0.0);
}

TEST_CASE("spatially constant targets reduce to the known ordinary equation") {
  // 2m e^{2mu} u_tt + m(3m+1) e^{2mu} u_t^2 = -target(t) with zero data;
  // compare against a high-accuracy integration of the reduction.
  const TorusGrid g(1, 16);
  const double t_end = 0.5;
  const int solver_nodes = 501;
  const SpaceTimeField target = sample_spacetime(
      g, uniform_nodes(0.0, t_end, solver_nodes), [](const double*, double t) { return 0.1 * std::cos(t); });
  PicardConfig cfg;
  cfg.measure_floor = false;
  const NonlinearSolution sol = picard_solve(target, GridField(g), GridField(g), GridField(g), cfg);
  REQUIRE(sol.report.converged);

  // Reference: y'' = -0.05 cos(t) e^{-2y} - 2 (y')^2, classical RK4.
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
    const double k2y = w + 0.5 * h * k1w, k2w = accel(t + 0.5 * h, y + 0.5 * h * k1y, w + 0.5 * h * k1w);
    const double k3y = w + 0.5 * h * k2w, k3w = accel(t + 0.5 * h, y + 0.5 * h * k2y, w + 0.5 * h * k2w);
    const double k4y = w + h * k3w, k4w = accel(t + h, y + h * k3y, w + h * k3w);
    y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
    if ((step + 1) % refine == 0) reference.push_back(y);
  }

  REQUIRE(sol.u.node_count() == solver_nodes);
  double worst = 0.0;
  for (int j = 0; j < solver_nodes; ++j)
    worst = std::max(worst, (sol.u.values.col(j).array() - reference[j]).abs().maxCoeff());
  CHECK(worst < 1e-5);
}

TEST_CASE("manufactured targets are recovered with contracting iterates") {
  const TorusGrid g(1, 32);
  const double t_end = 0.3;
  const SpaceTimeField target = sample_spacetime(g, uniform_nodes(0.0, t_end, 301), manufactured_target);
  const GridField phi(g);
  const GridField psi = sample(g, [](const double* x) { return 0.2 * std::sin(x[0]); });

  PicardConfig cfg;
  const NonlinearSolution sol = picard_solve(target, phi, psi, GridField(g), cfg);
  REQUIRE(sol.report.converged);
  CHECK(sol.window == doctest::Approx(t_end));

  double gap = 0.0;
  for (int j = 0; j < sol.u.node_count(); ++j) {
    const double t = sol.u.time_nodes[j];
    for (int p = 0; p < static_cast<int>(sol.u.grid.total_points()); ++p) {
      double x[1] = {2.0 * std::numbers::pi * p / sol.u.grid.points_per_axis()};
      gap = std::max(gap, std::abs(sol.u.values(p, j) - manufactured_u(x, t)));
    }
  }
  CHECK(gap < 1e-4);

  REQUIRE(sol.report.ratios.size() >= 2);
  for (double r : sol.report.ratios) CHECK(r < 1.0);
  CHECK(sol.report.geometric_r2 > 0.95);
  CHECK(sol.max_residual <= sol.residual_threshold);
  CHECK(sol.residual_floor > 0.0);
}

TEST_CASE("small targets solve on the full interval inside the energy bound") {
  const TorusGrid g(1, 16);
  const SpaceTimeField target = sample_spacetime(
      g, uniform_nodes(0.0, 0.5, 501),
      [](const double* x, double t) { return 1e-3 * std::sin(x[0]) * std::sin(t); });
  PicardConfig cfg;
  const NonlinearSolution sol = small_data_solve(target, cfg);
  REQUIRE(sol.report.converged);
  CHECK(sol.report.window_history.size() == 1);
  CHECK(sol.window == doctest::Approx(0.5));
  CHECK(sol.max_residual <= sol.residual_threshold);

  const EnergyTrace& trace = sol.report.energies.back();
  CHECK(trace.sqrt_energy.maxCoeff() <= sol.bound_d / (2.0 * std::sqrt(2.0)));
  for (double b : sol.report.sup_norms) CHECK(b <= sol.bound_d);
}

TEST_CASE("amplitude sweep reports the last convergent scale") {
  const TorusGrid g(1, 16);
  const SpaceTimeField shape = sample_spacetime(
      g, uniform_nodes(0.0, 0.3, 151),
      [](const double* x, double t) { return std::sin(x[0]) * std::sin(t); });
  PicardConfig cfg;
  cfg.dt = 2e-3;
  cfg.measure_floor = false;
  const AmplitudeSearch search = amplitude_search(shape, cfg, 1e-3, 1.5e-2);
  CHECK(search.last_convergent >= 1e-2);
  CHECK(search.first_failed == 0.0);
  CHECK(search.solves == 3);
}

TEST_CASE("probe variants of the trivial problem coincide") {
  const TorusGrid g(1, 16);
  const SpaceTimeField target(g, uniform_nodes(0.0, 0.1, 6));
  PicardConfig cfg;
  cfg.kmax = 4;
  cfg.dt = 2e-2;
  cfg.measure_floor = false;
  const UniquenessReport rep =
      uniqueness_probe(target, GridField(g), GridField(g), GridField(g), cfg);
  CHECK(rep.coarse_max < 1e-12);
  CHECK(rep.refined_max < 1e-12);
  CHECK(rep.shrinking);
}
