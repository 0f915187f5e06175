// Grid-sampled Riemannian metrics and the volume-preserving deformed product
// metric K = rho^n g (+) rho^{-m} h with rho = e^{2u}.
//
// Product grids order the m periodic axes of the first factor before the n
// axes of the second; for n = 1 the second factor is the interval [0, T]
// (N + 1 nodes), otherwise another flat torus.
#pragma once

#include <vector>

#include "curveforge/product_grid.hpp"

namespace curveforge {

// Packed upper-triangle index for a symmetric dim x dim matrix, A <= B.
inline int sym_index(int A, int B, int dim) {
  if (A > B) std::swap(A, B);
  return A * dim - A * (A - 1) / 2 + (B - A);
}

// Symmetric positive-definite matrix field: components, inverse, determinant.
struct SampledMetric {
  ProductGrid grid;
  std::vector<Array> comp;      // dim*(dim+1)/2 packed component fields
  std::vector<Array> inv_comp;  // same packing
  Array det;

  int dim() const { return grid.dim(); }
  double component(std::size_t p, int A, int B) const {
    return comp[sym_index(A, B, dim())][static_cast<Eigen::Index>(p)];
  }
  double inverse_component(std::size_t p, int A, int B) const {
    return inv_comp[sym_index(A, B, dim())][static_cast<Eigen::Index>(p)];
  }
};

// Builds inverse and determinant pointwise; throws std::invalid_argument if
// the matrix is not positive definite (eigenvalues above 1e-10) everywhere.
SampledMetric make_metric(const ProductGrid& g, std::vector<Array> comps);

// Identity metric components on a grid.
std::vector<Array> identity_metric_comps(const ProductGrid& g);

// Conformally flat factor metric e^{2 phi} * delta on a (fully periodic) grid.
std::vector<Array> conformal_metric_comps(const ProductGrid& g, const Array& phi);

// Closed-form scalar curvature of e^{2 phi} * delta (spectral derivatives):
// R = e^{-2 phi} (-2(d-1) lap(phi) - (d-1)(d-2) |grad phi|^2).
Array conformal_scalar_curvature(const ProductGrid& g, const Array& phi);

// The product manifold T^m x N carrying the deformation.
struct ProductManifoldSpec {
  int m = 1;                  // first factor dimension (1..3)
  int n = 1;                  // second factor dimension (1 => interval [0, T])
  int points_per_axis = 32;   // periodic axes; the interval axis gets N + 1 nodes
  double interval_length = 1.0;
  std::vector<Array> g_comp;  // metric of the first factor on its own grid; empty => flat
  std::vector<Array> h_comp;  // metric of the second factor; empty => flat

  ProductGrid product_grid() const;
  ProductGrid factor_grid_m() const;
  ProductGrid factor_grid_n() const;
  bool g_is_flat() const { return g_comp.empty(); }
  bool h_is_flat() const { return h_comp.empty(); }
};

// Lifts a field on one factor to the product grid (x-part varies, y fixed or
// vice versa).
Array broadcast_first_factor(const ProductManifoldSpec& spec, const Array& field_m);
Array broadcast_second_factor(const ProductManifoldSpec& spec, const Array& field_n);

struct DeformedMetric {
  ProductManifoldSpec spec;
  Array u;               // deformation exponent on the product grid
  SampledMetric metric;  // K, K^{-1}, det K
};

// K_ij = e^{2nu} g_ij, K_ab = e^{-2mu} h_ab, zero off-diagonal blocks.
// Verifies det K = det g * det h within 1e-10 relative at every point.
DeformedMetric assemble_deformed_metric(const ProductManifoldSpec& spec, const Array& u);

}  // namespace curveforge
