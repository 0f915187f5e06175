#include "curveforge/torus_grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace curveforge {

TorusGrid::TorusGrid(int dim, int points_per_axis) : dim_(dim), n_(points_per_axis) {
  if (dim < 1 || dim > kMaxDim)
    throw std::invalid_argument("TorusGrid: dim must be in [1, " + std::to_string(kMaxDim) + "]");
  if (n_ < 4 || n_ % 2 != 0)
    throw std::invalid_argument("TorusGrid: points_per_axis must be even and >= 4");
  spacing_ = 2.0 * std::numbers::pi / n_;
  total_ = 1;
  for (int a = 0; a < dim_; ++a) total_ *= static_cast<std::size_t>(n_);
}

double TorusGrid::volume() const {
  return std::pow(2.0 * std::numbers::pi, dim_);
}

std::size_t TorusGrid::flat_index(const int* idx) const {
  std::size_t f = 0;
  for (int a = 0; a < dim_; ++a) f = f * n_ + static_cast<std::size_t>(idx[a]);
  return f;
}

void TorusGrid::unflatten(std::size_t flat, int* idx) const {
  for (int a = dim_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % n_);
    flat /= n_;
  }
}

void TorusGrid::coordinates(std::size_t flat, double* x) const {
  int idx[kMaxDim];
  unflatten(flat, idx);
  for (int a = 0; a < dim_; ++a) x[a] = coordinate(idx[a]);
}

}  // namespace curveforge
