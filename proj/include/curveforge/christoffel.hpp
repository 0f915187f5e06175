// Christoffel symbols of the deformed product metric, by two independent
// routes:
//
//  * finite differences: Gamma_{BC|D} = (d_C K_BD + d_B K_CD - d_D K_BC)/2
//    from second-order stencils of the sampled metric components, raised with
//    the pointwise inverse metric;
//  * closed form (flat factors only): algebraic families in the first
//    derivatives of the deformation exponent u.
//
// Index convention: uppercase A,B,... run over the full product, i,j,k over
// the first (m-dimensional) factor, alpha,beta,gamma over the second.
#pragma once

#include "curveforge/metric_fields.hpp"

namespace curveforge {

// All Christoffel symbols of a metric at one grid point.
// lowered[B][C][D] = Gamma_{BC|D} (symmetric in B,C);
// raised[A][B][C]  = Gamma^A_{BC} (symmetric in B,C).
struct ChristoffelPoint {
  int dim = 0;
  double lowered[kProductDim][kProductDim][kProductDim] = {};
  double raised[kProductDim][kProductDim][kProductDim] = {};
};

// Finite-difference route: stencil derivatives of the sampled components.
ChristoffelPoint christoffel_fd_point(const SampledMetric& metric, std::size_t p);

// Deformation exponent together with its first derivatives along every
// product axis (spectral on periodic axes, stencil on the interval axis).
struct DeformationDerivs {
  ProductGrid grid;
  Array u;
  std::vector<Array> du;  // one field per axis

  double deriv(std::size_t p, int a) const { return du[a][static_cast<Eigen::Index>(p)]; }
};

DeformationDerivs deformation_derivs(const ProductManifoldSpec& spec, const Array& u);

// Closed-form route, valid when both factor metrics are flat. The symbols
// fall into six families per variance, organised by which factor each index
// belongs to; every family is linear in the first derivatives of u with an
// e^{c u} prefactor fixed by the block weights.
ChristoffelPoint christoffel_closed_form_point(const ProductManifoldSpec& spec,
                                               const DeformationDerivs& derivs, std::size_t p);

// Sum of |sum_A Gamma^A_{BA}| over B at a point; vanishes identically for the
// volume-preserving deformation (the traces cancel family against family).
double christoffel_trace_residual(const ChristoffelPoint& ch);

}  // namespace curveforge
