#include "curveforge/product_grid.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace curveforge {

ProductGrid::ProductGrid(std::vector<AxisSpec> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || static_cast<int>(axes_.size()) > kProductDim)
    throw std::invalid_argument("ProductGrid: dimension must be in [1, " +
                                std::to_string(kProductDim) + "]");
  for (const AxisSpec& ax : axes_) {
    if (ax.length <= 0.0) throw std::invalid_argument("ProductGrid: axis length must be positive");
    if (ax.periodic && (ax.points < 4 || ax.points % 2 != 0))
      throw std::invalid_argument("ProductGrid: periodic axes need an even point count >= 4");
    if (!ax.periodic && ax.points < 5)
      throw std::invalid_argument("ProductGrid: interval axes need at least 5 nodes");
  }
  strides_.assign(axes_.size(), 1);
  for (int a = dim() - 2; a >= 0; --a)
    strides_[a] = strides_[a + 1] * static_cast<std::size_t>(axes_[a + 1].points);
  total_ = strides_[0] * static_cast<std::size_t>(axes_[0].points);
}

std::size_t ProductGrid::flat_index(const int* idx) const {
  std::size_t f = 0;
  for (int a = 0; a < dim(); ++a) f += strides_[a] * static_cast<std::size_t>(idx[a]);
  return f;
}

void ProductGrid::unflatten(std::size_t flat, int* idx) const {
  for (int a = dim() - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % axes_[a].points);
    flat /= axes_[a].points;
  }
}

void ProductGrid::coordinates(std::size_t flat, double* x) const {
  int idx[kProductDim];
  unflatten(flat, idx);
  for (int a = 0; a < dim(); ++a) x[a] = coordinate(a, idx[a]);
}

bool ProductGrid::operator==(const ProductGrid& o) const {
  if (dim() != o.dim()) return false;
  for (int a = 0; a < dim(); ++a) {
    const AxisSpec &x = axes_[a], &y = o.axes_[a];
    if (x.points != y.points || x.periodic != y.periodic ||
        std::abs(x.length - y.length) > 1e-12 * std::max(1.0, std::abs(x.length)))
      return false;
  }
  return true;
}

ProductField::ProductField(const ProductGrid& g, Array s) : grid(g), samples(std::move(s)) {
  if (static_cast<std::size_t>(samples.size()) != g.total_points())
    throw std::invalid_argument("ProductField: sample count does not match grid");
}

AxisStencil first_derivative_stencil(const ProductGrid& g, std::size_t p, int a) {
  const AxisSpec& ax = g.axis(a);
  const std::size_t s = g.stride(a);
  const int j = g.axis_index(p, a);
  const double h = ax.spacing();
  const std::size_t line = p - static_cast<std::size_t>(j) * s;
  const auto flat = [&](int jj) { return line + static_cast<std::size_t>(jj) * s; };
  AxisStencil st;
  const auto add = [&](int jj, double w) {
    st.node[st.count] = flat(jj);
    st.weight[st.count] = w;
    ++st.count;
  };
  if (ax.periodic) {
    add((j + 1) % ax.points, 0.5 / h);
    add((j + ax.points - 1) % ax.points, -0.5 / h);
  } else if (j == 0) {
    add(0, -1.5 / h);
    add(1, 2.0 / h);
    add(2, -0.5 / h);
  } else if (j == ax.points - 1) {
    add(j, 1.5 / h);
    add(j - 1, -2.0 / h);
    add(j - 2, 0.5 / h);
  } else {
    add(j + 1, 0.5 / h);
    add(j - 1, -0.5 / h);
  }
  return st;
}

AxisStencil second_derivative_stencil(const ProductGrid& g, std::size_t p, int a) {
  const AxisSpec& ax = g.axis(a);
  const std::size_t s = g.stride(a);
  const int j = g.axis_index(p, a);
  const double h2 = ax.spacing() * ax.spacing();
  const std::size_t line = p - static_cast<std::size_t>(j) * s;
  const auto flat = [&](int jj) { return line + static_cast<std::size_t>(jj) * s; };
  AxisStencil st;
  const auto add = [&](int jj, double w) {
    st.node[st.count] = flat(jj);
    st.weight[st.count] = w;
    ++st.count;
  };
  if (ax.periodic) {
    add((j + 1) % ax.points, 1.0 / h2);
    add(j, -2.0 / h2);
    add((j + ax.points - 1) % ax.points, 1.0 / h2);
  } else if (j == 0) {
    add(0, 2.0 / h2);
    add(1, -5.0 / h2);
    add(2, 4.0 / h2);
    add(3, -1.0 / h2);
  } else if (j == ax.points - 1) {
    add(j, 2.0 / h2);
    add(j - 1, -5.0 / h2);
    add(j - 2, 4.0 / h2);
    add(j - 3, -1.0 / h2);
  } else {
    add(j + 1, 1.0 / h2);
    add(j, -2.0 / h2);
    add(j - 1, 1.0 / h2);
  }
  return st;
}

double stencil_derivative_at(const ProductGrid& g, const Array& f, std::size_t p, int a) {
  const AxisStencil st = first_derivative_stencil(g, p, a);
  double v = 0.0;
  for (int i = 0; i < st.count; ++i) v += st.weight[i] * f[static_cast<Eigen::Index>(st.node[i])];
  return v;
}

Array stencil_axis_derivative(const ProductGrid& g, const Array& f, int a, int order) {
  if (order != 1 && order != 2)
    throw std::invalid_argument("stencil_axis_derivative: order must be 1 or 2");
  const AxisSpec& ax = g.axis(a);
  const std::size_t s = g.stride(a);
  const int n = ax.points;
  const double h = ax.spacing();
  Array out(f.size());
  const std::size_t block = s * static_cast<std::size_t>(n);
  for (std::size_t base = 0; base < g.total_points(); base += block) {
    for (std::size_t inner = 0; inner < s; ++inner) {
      const std::size_t o = base + inner;
      const auto at = [&](int j) { return f[o + static_cast<std::size_t>(j) * s]; };
      auto put = [&](int j, double v) { out[o + static_cast<std::size_t>(j) * s] = v; };
      if (order == 1) {
        for (int j = 0; j < n; ++j) {
          if (ax.periodic) {
            put(j, (at((j + 1) % n) - at((j + n - 1) % n)) / (2.0 * h));
          } else if (j == 0) {
            put(j, (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h));
          } else if (j == n - 1) {
            put(j, (3.0 * at(j) - 4.0 * at(j - 1) + at(j - 2)) / (2.0 * h));
          } else {
            put(j, (at(j + 1) - at(j - 1)) / (2.0 * h));
          }
        }
      } else {
        const double h2 = h * h;
        for (int j = 0; j < n; ++j) {
          if (ax.periodic) {
            put(j, (at((j + 1) % n) - 2.0 * at(j) + at((j + n - 1) % n)) / h2);
          } else if (j == 0) {
            put(j, (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / h2);
          } else if (j == n - 1) {
            put(j, (2.0 * at(j) - 5.0 * at(j - 1) + 4.0 * at(j - 2) - at(j - 3)) / h2);
          } else {
            put(j, (at(j + 1) - 2.0 * at(j) + at(j - 1)) / h2);
          }
        }
      }
    }
  }
  return out;
}

Array spectral_axis_derivative(const ProductGrid& g, const Array& f, int a, int order) {
  const AxisSpec& ax = g.axis(a);
  if (!ax.periodic)
    throw std::invalid_argument("spectral_axis_derivative: axis is not periodic");
  const int n = ax.points;
  const double scale = 2.0 * std::numbers::pi / ax.length;  // bin k -> wavenumber
  using Complex = std::complex<double>;
  std::vector<Complex> fac(n);
  for (int j = 0; j < n; ++j) {
    const int k = j <= n / 2 - 1 ? j : j - n;
    fac[j] = (order % 2 == 1 && j == n / 2)
                 ? Complex(0.0, 0.0)
                 : std::pow(Complex(0.0, k * scale), order) / static_cast<double>(n);
  }
  Eigen::FFT<double> fft;
  const std::size_t s = g.stride(a);
  const std::size_t block = s * static_cast<std::size_t>(n);
  Array out(f.size());
  std::vector<Complex> line(n), freq(n);
  for (std::size_t base = 0; base < g.total_points(); base += block) {
    for (std::size_t inner = 0; inner < s; ++inner) {
      const std::size_t o = base + inner;
      for (int j = 0; j < n; ++j) line[j] = f[o + static_cast<std::size_t>(j) * s];
      fft.fwd(freq, line);
      for (int j = 0; j < n; ++j) freq[j] *= fac[j] * static_cast<double>(n);
      fft.inv(line, freq);
      for (int j = 0; j < n; ++j) out[o + static_cast<std::size_t>(j) * s] = line[j].real();
    }
  }
  return out;
}

Array axis_derivative(const ProductGrid& g, const Array& f, int a, int order) {
  if (g.axis(a).periodic) return spectral_axis_derivative(g, f, a, order);
  if (order <= 2) return stencil_axis_derivative(g, f, a, order);
  Array out = stencil_axis_derivative(g, f, a, 2);
  return axis_derivative(g, out, a, order - 2);
}

Eigen::Array<bool, Eigen::Dynamic, 1> interior_mask(const ProductGrid& g, int margin) {
  Eigen::Array<bool, Eigen::Dynamic, 1> mask(g.total_points());
  for (std::size_t p = 0; p < g.total_points(); ++p) {
    bool ok = true;
    for (int a = 0; a < g.dim() && ok; ++a) {
      if (g.axis(a).periodic) continue;
      const int j = g.axis_index(p, a);
      ok = j >= margin && j < g.axis(a).points - margin;
    }
    mask[static_cast<Eigen::Index>(p)] = ok;
  }
  return mask;
}

}  // namespace curveforge
