// Uniform periodic grid on the flat torus [0, 2*pi)^m with identity metric.
#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace curveforge {

// Hard cap on spatial dimension; keeps per-point scratch on the stack.
inline constexpr int kMaxDim = 4;

// Grid over [0, 2*pi)^m, N points per axis, spacing 2*pi/N.  Samples are
// flattened row-major over axes (last axis fastest).  N must be even and
// >= 4 so the Nyquist mode is representable.
class TorusGrid {
public:
  TorusGrid() = default;
  TorusGrid(int dim, int points_per_axis);

  int dim() const { return dim_; }
  int points_per_axis() const { return n_; }
  double spacing() const { return spacing_; }
  std::size_t total_points() const { return total_; }
  double volume() const;  // (2*pi)^m

  // Row-major flattening; idx must hold dim() entries in [0, N).
  std::size_t flat_index(const int* idx) const;
  std::size_t flat_index(const std::vector<int>& idx) const { return flat_index(idx.data()); }
  void unflatten(std::size_t flat, int* idx) const;

  double coordinate(int axis_index) const { return spacing_ * axis_index; }
  void coordinates(std::size_t flat, double* x) const;

  // Signed wavevector component of DFT bin b along one axis:
  // b for b <= N/2-1, b-N otherwise (so the Nyquist bin maps to -N/2).
  int wavevector(int bin) const { return bin <= n_ / 2 - 1 ? bin : bin - n_; }

  bool operator==(const TorusGrid& o) const {
    return dim_ == o.dim_ && n_ == o.n_;
  }

private:
  int dim_ = 0;
  int n_ = 0;
  double spacing_ = 0.0;
  std::size_t total_ = 0;
};

// Iterates all multi-indices of a grid in flat order.  `idx` is updated in
// place; returns false after the last index.
inline bool next_multi_index(const TorusGrid& g, int* idx) {
  for (int a = g.dim() - 1; a >= 0; --a) {
    if (++idx[a] < g.points_per_axis()) return true;
    idx[a] = 0;
  }
  return false;
}

}  // namespace curveforge
