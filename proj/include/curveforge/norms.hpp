// Quadrature and norms: L2, Sobolev H^s, C^k, and their space-time versions.
//
// Conventions:
//   ||f||_{H^s}^2 = sum_{j=0..s} ||grad^j f||_{L2}^2, where |grad^j f|^2 sums
//   the squares of all j-th order partial derivatives (multinomial weights).
//   ||f||_{C^k} = (sum_{j=0..k} ||grad^j f||_{C0}^2)^{1/2} with pointwise
//   magnitudes maximized over the grid.
#pragma once

#include "curveforge/grid_field.hpp"
#include "curveforge/spectral.hpp"

namespace curveforge {

// Uniform-grid quadrature h^m * sum(samples); exact for trig polynomials
// below the Nyquist frequency.
double integrate(const GridField& f);

double l2_norm(const GridField& f);

// Spectral H^s norm, sqrt(sum_k (sum_{j<=s} |k|^{2j}) |c_k|^2 * (2*pi)^m).
// Throws if s < 0 or s > N/2 (not resolvable on this grid).
double sobolev_norm(const GridField& f, int s);

// Pointwise |grad^j f|^2 (sum over ordered j-tuples of partials, computed via
// multisets with multinomial weights).
GridField grad_order_squared(const GridField& f, int j);

double c0_norm(const GridField& f);
double ck_norm(const GridField& f, int k);

// sup over time nodes of ||u(., t)||_{H^s}  (the C^0(I, H^s) norm).
double sup_time_sobolev(const SpaceTimeField& u, int s);

// W^{i,inf}(I, H^s) norm: sqrt(sum_{j=0..i} sup_t ||d_t^j u||_{H^s}^2).
double sobolev_norm_spacetime(const SpaceTimeField& u, int i, int s);

// Trapezoid rule over the time nodes of a per-node scalar sequence.
double integrate_time(const Eigen::VectorXd& nodes, const Eigen::VectorXd& values);

}  // namespace curveforge
