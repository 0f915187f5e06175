// Nonlinear solver for the curvature-prescription equation of the torus
// deformation: find u(x,t) on T^m x [0,T] with
//
//   e^{-2u} R_g + 2 e^{-2u} lap(u) - 2m e^{2mu} u_tt
//     - (m^2+m+2) e^{-2u} |grad u|^2 - m(3m+1) e^{2mu} u_t^2  =  target,
//
// by fixed-point iteration: each sweep freezes the exponential coefficients
// at the previous iterate, leaving a linear wave equation that the spectral
// Galerkin integrator solves with the original initial data. Iterate
// distances are measured in C^0(H^s) + C^0(H^{s-1}) and must contract; an
// adaptive mode halves the time window until they do. A small-data entry
// point runs the full interval with zero data, and a probe re-solves under
// refinement and re-seeding to check that all variants land on one solution.
#pragma once

#include <cstdint>

#include "curveforge/energy.hpp"
#include "curveforge/galerkin.hpp"

namespace curveforge {

// F(u, v): the right-hand side of the linear sweep, with the nonlinearity
// frozen at the background v (the equation itself is recovered at v = u),
//
//   F = 1/2 [ -e^{-2mv} target + e^{-2(m+1)v} r_g
//             - (m^2+m+2) e^{-2(m+1)v} <grad v, grad u> - m(3m+1) v_t u_t ].
//
// Spatial gradients are spectral; time derivatives use second-order stencils.
SpaceTimeField nonlinear_rhs(const SpaceTimeField& u, const SpaceTimeField& v,
                             const SpaceTimeField& target, const GridField& r_g);

// Coefficient fields of the linear sweep in the integrator's normal form
//   u_tt + a u_t = alpha lap(u) + <grad beta, grad u> + gamma u + f,
// equivalent to  m u_tt - e^{-2(m+1)v} lap(u) = F(u, v)  after dividing by m:
//   a     = (3m+1)/2 v_t
//   alpha = e^{-2(m+1)v} / m
//   beta  = (m^2+m+2) / (4m(m+1)) e^{-2(m+1)v}   (grad beta reproduces the
//           drift term because e^{-2(m+1)v} grad v is a gradient)
//   gamma = 0
//   f     = ( -e^{-2mv} target + e^{-2(m+1)v} r_g ) / (2m).
struct LinearCoefficients {
  SpaceTimeField damping;            // a
  SpaceTimeField stiffness;          // alpha
  SpaceTimeField gradient_coupling;  // beta
  SpaceTimeField potential;          // gamma
  SpaceTimeField forcing;            // f
};

// The first overload receives the exact time derivative of the background
// (available in coefficient space during the iteration); the second computes
// it by stencils.
LinearCoefficients linearize_step(const SpaceTimeField& v, const SpaceTimeField& v_t,
                                  const SpaceTimeField& target, const GridField& r_g);
LinearCoefficients linearize_step(const SpaceTimeField& v, const SpaceTimeField& target,
                                  const GridField& r_g);

// Pointwise defect of the equation: curvature realized by u minus the target.
// Same discrete derivative conventions as nonlinear_rhs, so the algebraic
// identity  m u_tt - e^{-2(m+1)u} lap(u) - F(u,u) = -(e^{-2mu}/2) * defect
// holds to rounding.
SpaceTimeField curvature_residual(const SpaceTimeField& u, const SpaceTimeField& target,
                                  const GridField& r_g);

// Max |residual| over interior time nodes (end stencils are one-sided).
double max_interior_residual(const SpaceTimeField& residual);

struct PicardConfig {
  int smoothness = 2;    // requested k; energy index s = floor(m/2 + k + 1)
  double bound_d = 0.0;  // iterate bound D; 0 => 2*sqrt(2)*(1+sqrt(E_{s+1}(0))) + 1
  double window = 0.0;   // initial time window; 0 => full extent of the target
  int max_iters = 25;
  double tol = 1e-8;     // fixed-point tolerance on the iterate distance
  bool adaptive = true;  // halve the window on stalled contraction or D breach
  int max_halvings = 6;
  int kmax = 8;          // Galerkin cutoff of the linear sweeps
  double dt = 1e-3;
  bool measure_floor = true;  // re-solve at dt/2 to calibrate the residual scale
};

struct IterationReport {
  std::vector<double> distances;       // d_n between consecutive iterates
  std::vector<double> ratios;          // d_{n+1} / d_n
  std::vector<double> sup_norms;       // sup_t |u|_{H^{s+1}} + |u_t|_{H^s} per iterate
  std::vector<EnergyTrace> energies;   // E_s trace of each iterate
  std::vector<double> window_history;  // time windows attempted
  double geometric_r2 = 1.0;           // R^2 of the log-linear fit of d_n
  bool converged = false;
  bool bound_violated = false;  // final attempt exceeded D
};

struct NonlinearSolution {
  SpaceTimeField u;
  SpaceTimeField ut;
  SpaceTimeField residual;
  double max_residual = 0.0;        // over interior time nodes
  double residual_floor = 0.0;      // same quantity for the dt/2 re-solve
  double residual_threshold = 0.0;  // 10 x floor
  double window = 0.0;              // final time window
  double bound_d = 0.0;
  int sobolev_index = 0;  // s
  GalerkinSolution spectral;
  IterationReport report;
};

// Iterates from u_1 = 0 (or the seed field, held constant in time) on
// [0, window], halving the window when adaptive. phi/psi are the initial
// value and velocity; r_g is the scalar curvature of the spatial metric
// (zero field for the flat torus).
NonlinearSolution picard_solve(const SpaceTimeField& target, const GridField& phi,
                               const GridField& psi, const GridField& r_g,
                               const PicardConfig& cfg, const GridField* seed = nullptr);

// Full-interval solve with zero data on the flat torus: no windowing; a
// stalled contraction or a D breach is a failure, not a restart.
NonlinearSolution small_data_solve(const SpaceTimeField& target, const PicardConfig& cfg);

// Scales the target until small_data_solve stops converging, then bisects;
// reports the last convergent and first failed amplitudes.
struct AmplitudeSearch {
  double last_convergent = 0.0;
  double first_failed = 0.0;  // 0 when no failure up to the cap
  int solves = 0;
};

AmplitudeSearch amplitude_search(const SpaceTimeField& shape, const PicardConfig& cfg,
                                 double start_amplitude, double amplitude_cap);

// Sup over shared recorded times of the pointwise gap between two spectral
// solutions, sampled on a grid fine enough for both.
double c0_solution_gap(const GalerkinSolution& a, const GalerkinSolution& b);

// Re-solves the same problem with (i) doubled cutoff, (ii) halved step,
// (iii) a random low-frequency seed, at the base configuration and once more
// with the base itself refined; all pairwise gaps must agree and shrink.
struct UniquenessReport {
  Eigen::VectorXd coarse_gaps;   // 6 pairwise gaps among base/cutoff/step/seed
  Eigen::VectorXd refined_gaps;  // same pairs, one refinement level up
  double coarse_max = 0.0;
  double refined_max = 0.0;
  bool shrinking = false;  // refined_max < coarse_max or below the noise floor
};

UniquenessReport uniqueness_probe(const SpaceTimeField& target, const GridField& phi,
                                  const GridField& psi, const GridField& r_g,
                                  const PicardConfig& cfg, std::uint64_t seed = 20240901);

}  // namespace curveforge
