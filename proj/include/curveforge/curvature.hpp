// Scalar curvature of the deformed product metric by two independent routes:
//
//  * a finite-difference oracle: Christoffel symbols from stencil derivatives
//    of the sampled metric components, Ricci from stencil derivatives of the
//    symbols, scalar by contraction — the closed form is never consulted;
//  * the closed form in u, its factor Laplacians and gradient norms, with
//    conformal corrections when the first factor carries e^{2 phi} * delta.
//
// The oracle converges at second order, so the gap between the routes must
// shrink by a factor close to 4 when every axis resolution doubles; watching
// that ratio is the primary validation of the curvature algebra.
#pragma once

#include "curveforge/christoffel.hpp"

namespace curveforge {

// Ricci tensor and scalar at one grid point by nested finite differences.
// first_trace / second_trace split the scalar between the two factor blocks
// (the first `first_block` axes versus the rest).
struct RicciPoint {
  int dim = 0;
  double ricci[kProductDim][kProductDim] = {};
  double scalar = 0.0;
  double first_trace = 0.0;
  double second_trace = 0.0;
};

RicciPoint ricci_fd_point(const SampledMetric& metric, std::size_t p, int first_block);

// Riemann tensor at one grid point: riem[r][p][q][i] = R^r_{pqi} with
//   R^r_{pqi} = d_p Gamma^r_{qi} - d_q Gamma^r_{pi}
//               + Gamma^r_{ps} Gamma^s_{qi} - Gamma^r_{qs} Gamma^s_{pi},
// so that [nabla_p, nabla_q] B_i = - sum_r R^r_{pqi} B_r for covectors and
// the contraction sum_r R^r_{rqi} recovers the Ricci tensor.
struct RiemannPoint {
  int dim = 0;
  double riem[kProductDim][kProductDim][kProductDim][kProductDim] = {};
};

RiemannPoint riemann_fd_point(const SampledMetric& metric, std::size_t p);

// Scalar curvature of a sampled metric at every grid point (multi-threaded;
// one-sided stencils near interval ends — restrict comparisons with
// interior_mask).
Array scalar_curvature_fd(const SampledMetric& metric);

// Factor-block partial traces sum_{ij} K^{ij} R_ij and sum_{ab} K^{ab} R_ab
// of a sampled metric whose first `first_block` axes form the first factor.
struct TraceFields {
  Array first;
  Array second;
};

TraceFields partial_traces_fd(const SampledMetric& metric, int first_block);

// Optional curved-factor data for the closed-form route. The first factor may
// carry a conformal metric e^{2 phi_g} * delta (phi_g sampled on the factor
// grid); the second factor must stay flat for this route.
struct FormulaOptions {
  Array phi_g;
};

// Closed form on the product grid:
//   R = e^{-2nu} R_g + e^{2mu} R_h
//       + 2n e^{-2nu} lap_g u - 2m e^{2mu} lap_h u
//       - n(nm + 2n + m^2) e^{-2nu} |grad_g u|^2
//       - m(nm + 2m + n^2) e^{2mu} |grad_h u|^2.
Array scalar_curvature_formula(const ProductManifoldSpec& spec, const Array& u);
Array scalar_curvature_formula(const ProductManifoldSpec& spec, const Array& u,
                               const FormulaOptions& opts);

// Closed-form factor-block traces (flat factors); their sum is the full
// closed form, and each matches the corresponding FD partial trace.
TraceFields sectional_traces(const ProductManifoldSpec& spec, const Array& u);

// Maximum |FD - closed form| over the comparison region (margin-2 interior
// along interval axes, everywhere on fully periodic grids).
double max_curvature_gap(const ProductManifoldSpec& spec, const Array& u);
double max_curvature_gap(const ProductManifoldSpec& spec, const Array& u,
                         const FormulaOptions& opts);

}  // namespace curveforge
