// Spectral Galerkin integrator for second-order linear evolution equations
//
//   u_tt + a(x,t) u_t = alpha(x,t) lap(u) + <grad beta(x,t), grad u>
//                       + gamma(x,t) u + f(x,t)
//
// on the flat torus. The trial space is spanned by the orthonormal real
// Fourier basis up to a wavevector cutoff; projecting the equation yields a
// coefficient ODE system integrated with classical fourth-order Runge-Kutta.
// Coefficient matrices are assembled at the problem's time nodes and
// interpolated linearly at stage times (exact, since assembly is linear in
// the coefficient fields).
#pragma once

#include <array>
#include <vector>

#include "curveforge/norms.hpp"

namespace curveforge {

// Orthonormal real Fourier basis on T^m: the constant mode 1/sqrt(V) plus
// sqrt(2/V) cos(k.x) and sqrt(2/V) sin(k.x) for every canonical wavevector
// (first nonzero component positive) with max-norm at most kmax.
struct SpectralBasis {
  enum Kind { kConstant = 0, kCos = 1, kSin = 2 };
  struct Mode {
    std::array<int, 3> k = {0, 0, 0};
    double lambda = 0.0;  // |k|^2, the (-lap) eigenvalue
    Kind kind = kConstant;
  };

  TorusGrid grid;
  int kmax = 0;
  std::vector<Mode> modes;
  Eigen::MatrixXd values;                 // points x modes, sampled on `grid`
  std::vector<Eigen::MatrixXd> gradient;  // per axis, points x modes

  int size() const { return static_cast<int>(modes.size()); }
  double max_lambda() const;
  // Samples every mode on an arbitrary torus grid of the same dimension.
  Eigen::MatrixXd sample_on(const TorusGrid& g) const;
};

// Requires grid.points_per_axis >= 2*kmax + 2 so that products of two basis
// functions are integrated exactly by the grid quadrature.
SpectralBasis make_basis(const TorusGrid& grid, int kmax);

// L2 projection onto the basis (discrete quadrature).
Eigen::VectorXd project_initial_data(const SpectralBasis& basis, const GridField& f);

// Galerkin matrices for coefficient fields frozen at one time:
//   damping(j, i)   = (a w_i, w_j)
//   stiffness(j, i) = (alpha lambda_i w_i - <grad beta, grad w_i> - gamma w_i, w_j)
//   load(j)         = (f, w_j)
// so the projected equation reads eta'' = load - damping eta' - stiffness eta.
struct OperatorMatrices {
  Eigen::MatrixXd damping;
  Eigen::MatrixXd stiffness;
  Eigen::VectorXd load;
};

OperatorMatrices operator_matrices(const SpectralBasis& basis, const GridField& a,
                                   const GridField& alpha, const GridField& beta,
                                   const GridField& gamma, const GridField& f);

// The linear problem: coefficient fields share one set of ascending time
// nodes starting at 0; the equation is integrated from 0 to the last node.
struct LinearProblem {
  TorusGrid grid;
  SpaceTimeField damping;            // a
  SpaceTimeField stiffness;          // alpha (multiplies lap u)
  SpaceTimeField gradient_coupling;  // beta (its gradient couples to grad u)
  SpaceTimeField potential;          // gamma
  SpaceTimeField forcing;            // f
  GridField initial_value;
  GridField initial_velocity;
};

struct GalerkinSolution {
  SpectralBasis basis;
  std::vector<double> times;  // recorded times, starting at 0
  Eigen::MatrixXd coeff;      // modes x times
  Eigen::MatrixXd coeff_dt;   // modes x times (from the first-order system)

  int node_count() const { return static_cast<int>(times.size()); }
  // Weighted coefficient-space Sobolev norm sum_i (sum_{j<=s} lambda^j) c_i^2.
  double sobolev_at(int node, int s) const;
  double sobolev_dt_at(int node, int s) const;
  double sup_sobolev(int s) const;     // sup over recorded times, of u
  double sup_sobolev_dt(int s) const;  // same for u_t
  // Samples the solution (or its time derivative) on a torus grid.
  SpaceTimeField on_grid(const TorusGrid& g) const;
  SpaceTimeField on_grid_dt(const TorusGrid& g) const;
};

struct IntegrateOptions {
  int kmax = 8;
  double dt = 1e-3;
  int record_stride = 1;  // record every k-th accepted step (and the last)
};

// Fixed-cutoff integration. Refuses time steps beyond the stability limit
// 0.5 / (sqrt(sup |alpha|) * sqrt(max lambda)) of the fastest resolved mode.
// Coefficient fields and initial data are resampled spectrally when the
// cutoff needs a finer grid than the problem carries.
GalerkinSolution integrate_at_cutoff(const LinearProblem& problem, const IntegrateOptions& opts);

struct LinearSolveOptions {
  int kmax = 8;           // starting cutoff
  double dt = 1e-3;
  int record_stride = 1;
  double tol = 0.0;       // C0(H^1) gap between successive cutoffs; 0 => single pass
  int max_doublings = 6;
};

// Doubles the cutoff until two successive solutions differ by less than tol
// in C0(H^1) (sup over shared recorded times), then returns the finer one.
GalerkinSolution solve_linear(const LinearProblem& problem, const LinearSolveOptions& opts);

// Sup over shared recorded times of the H^s norm of the difference between
// two solutions (comparable across different cutoffs and step sizes; times
// must intersect).
double solution_gap(const GalerkinSolution& a, const GalerkinSolution& b, int s);

// Growth diagnostics: for each Sobolev order l in [2, max_order], the
// supremum over time of the squared solution size against the squared data
// bracket. The ratio must stay bounded as the cutoff doubles.
struct AprioriReport {
  int order = 0;
  double sup_norm_sq = 0.0;    // sup_t (|u|_{H^l}^2 + |u_t|_{H^{l-1}}^2)
  double data_quantity = 0.0;  // (|u0|_{H^l} + |u1|_{H^{l-1}} + int_0^T |f|_{H^{l-1}})^2
  double ratio = 0.0;
};

std::vector<AprioriReport> apriori_report(const GalerkinSolution& sol,
                                          const LinearProblem& problem, int max_order);

}  // namespace curveforge
