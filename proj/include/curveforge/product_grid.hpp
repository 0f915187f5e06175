// Grids over products of periodic circles and closed intervals, with the
// per-axis derivative machinery (spectral on periodic axes, second-order
// stencils on interval axes) used by the curvature checks.
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "curveforge/grid_field.hpp"

namespace curveforge {

// Hard cap on product dimension (m + n); per-point scratch lives on the stack.
inline constexpr int kProductDim = 5;

struct AxisSpec {
  int points = 0;
  double length = 0.0;   // 2*pi for circles, T for intervals
  bool periodic = true;  // interval axes include both endpoints

  double spacing() const { return periodic ? length / points : length / (points - 1); }
};

class ProductGrid {
public:
  ProductGrid() = default;
  explicit ProductGrid(std::vector<AxisSpec> axes);

  int dim() const { return static_cast<int>(axes_.size()); }
  const AxisSpec& axis(int a) const { return axes_[a]; }
  std::size_t total_points() const { return total_; }
  std::size_t stride(int a) const { return strides_[a]; }

  std::size_t flat_index(const int* idx) const;
  void unflatten(std::size_t flat, int* idx) const;
  double coordinate(int a, int j) const { return axes_[a].spacing() * j; }
  void coordinates(std::size_t flat, double* x) const;

  // Index along one axis recovered from a flat index.
  int axis_index(std::size_t flat, int a) const {
    return static_cast<int>((flat / strides_[a]) % static_cast<std::size_t>(axes_[a].points));
  }

  bool operator==(const ProductGrid& o) const;

private:
  std::vector<AxisSpec> axes_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 0;
};

// Scalar samples over a ProductGrid, flat row-major (last axis fastest).
struct ProductField {
  ProductGrid grid;
  Array samples;

  ProductField() = default;
  explicit ProductField(const ProductGrid& g) : grid(g), samples(Array::Zero(g.total_points())) {}
  ProductField(const ProductGrid& g, Array s);
};

template <typename Fn>
ProductField sample(const ProductGrid& g, Fn&& fn) {
  ProductField out(g);
  double x[kProductDim];
  for (std::size_t p = 0; p < g.total_points(); ++p) {
    g.coordinates(p, x);
    out.samples[static_cast<Eigen::Index>(p)] = fn(x);
  }
  return out;
}

// First derivative of a raw sample array along one axis at one point:
// central in the interior / with wrap-around, one-sided at interval ends.
// All stencils are second-order accurate.
double stencil_derivative_at(const ProductGrid& g, const Array& f, std::size_t p, int a);

// First-derivative stencil at a point along an axis: the (flat index, weight)
// pairs a pointwise evaluation needs — central in the interior, one-sided at
// interval ends. Second-order accurate in both cases.
struct AxisStencil {
  int count = 0;
  std::size_t node[4] = {};
  double weight[4] = {};
};
AxisStencil first_derivative_stencil(const ProductGrid& g, std::size_t p, int a);
AxisStencil second_derivative_stencil(const ProductGrid& g, std::size_t p, int a);

// Field-wise derivatives along an axis.  `order` is 1 or 2.
Array stencil_axis_derivative(const ProductGrid& g, const Array& f, int a, int order = 1);

// Spectral derivative along a periodic axis (throws on interval axes).
Array spectral_axis_derivative(const ProductGrid& g, const Array& f, int a, int order = 1);

// Best-available derivative: spectral on periodic axes, stencil otherwise.
Array axis_derivative(const ProductGrid& g, const Array& f, int a, int order = 1);

// True where every interval axis is at least `margin` nodes away from its
// endpoints (nested one-sided stencils lose an order inside this margin).
Eigen::Array<bool, Eigen::Dynamic, 1> interior_mask(const ProductGrid& g, int margin);

}  // namespace curveforge
