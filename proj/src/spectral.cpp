#include "curveforge/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <stdexcept>

namespace curveforge {

namespace {

using Complex = std::complex<double>;

// Applies the 1-D transform along `axis` to every line of `work`.
// sign = -1: unnormalized DFT; sign = +1: unnormalized inverse DFT.
void transform_axis(const TorusGrid& g, ComplexArray& work, int axis, int sign) {
  const int n = g.points_per_axis();
  std::size_t stride = 1;
  for (int a = g.dim() - 1; a > axis; --a) stride *= n;
  const std::size_t block = stride * n;
  const std::size_t total = g.total_points();

  Eigen::FFT<double> fft;
  std::vector<Complex> line(n), out(n);
  for (std::size_t base = 0; base < total; base += block) {
    for (std::size_t inner = 0; inner < stride; ++inner) {
      for (int j = 0; j < n; ++j) line[j] = work[base + inner + j * stride];
      if (sign < 0) {
        fft.fwd(out, line);
      } else {
        fft.inv(out, line);  // includes 1/N; undone below
        for (int j = 0; j < n; ++j) out[j] *= static_cast<double>(n);
      }
      for (int j = 0; j < n; ++j) work[base + inner + j * stride] = out[j];
    }
  }
}

// Per-point sum of f(k_axis) over axes, accumulated with stride loops.
Array accumulate_axiswise(const TorusGrid& g, double (*fn)(int)) {
  const int n = g.points_per_axis();
  Array acc = Array::Zero(g.total_points());
  std::size_t stride = 1;
  for (int axis = g.dim() - 1; axis >= 0; --axis) {
    const std::size_t block = stride * n;
    for (std::size_t base = 0; base < g.total_points(); base += block)
      for (int j = 0; j < n; ++j) {
        const double v = fn(g.wavevector(j));
        for (std::size_t inner = 0; inner < stride; ++inner) acc[base + inner + j * stride] += v;
      }
    stride *= n;
  }
  return acc;
}

// Multiplies the spectrum by (ik)^order along one axis; zeroes the Nyquist
// bin for odd orders so the result stays real.
void apply_derivative_factor(const TorusGrid& g, ComplexArray& work, int axis, int order) {
  const int n = g.points_per_axis();
  std::vector<Complex> fac(n);
  for (int j = 0; j < n; ++j) {
    if (order % 2 == 1 && j == n / 2) {
      fac[j] = 0.0;
    } else {
      fac[j] = std::pow(Complex(0.0, static_cast<double>(g.wavevector(j))), order);
    }
  }
  std::size_t stride = 1;
  for (int a = g.dim() - 1; a > axis; --a) stride *= n;
  const std::size_t block = stride * n;
  for (std::size_t base = 0; base < g.total_points(); base += block)
    for (int j = 0; j < n; ++j)
      for (std::size_t inner = 0; inner < stride; ++inner)
        work[base + inner + j * stride] *= fac[j];
}

GridField to_real(const TorusGrid& g, const ComplexArray& work, const char* what) {
  const double mag = work.abs().maxCoeff();
  const double residue = work.imag().abs().maxCoeff();
  if (residue > 1e-9 * std::max(1.0, mag))
    throw std::runtime_error(std::string(what) + ": imaginary residue above 1e-9");
  return GridField(g, work.real());
}

}  // namespace

SpectralField forward_transform(const GridField& f) {
  ensure_finite(f, "forward_transform");
  SpectralField out(f.grid);
  out.coeffs = f.samples.cast<Complex>();
  for (int axis = 0; axis < f.grid.dim(); ++axis) transform_axis(f.grid, out.coeffs, axis, -1);
  out.coeffs /= static_cast<double>(f.grid.total_points());
  return out;
}

GridField inverse_transform(const SpectralField& c) {
  ComplexArray work = c.coeffs;
  for (int axis = 0; axis < c.grid.dim(); ++axis) transform_axis(c.grid, work, axis, +1);
  return to_real(c.grid, work, "inverse_transform");
}

GridField partial_derivative(const GridField& f, int axis, int order) {
  if (axis < 0 || axis >= f.grid.dim())
    throw std::invalid_argument("partial_derivative: axis out of range");
  if (order < 0) throw std::invalid_argument("partial_derivative: negative order");
  if (order == 0) return f;
  SpectralField c = forward_transform(f);
  apply_derivative_factor(f.grid, c.coeffs, axis, order);
  return inverse_transform(c);
}

GridField derivative_multi(const GridField& f, const std::vector<int>& alpha) {
  if (static_cast<int>(alpha.size()) != f.grid.dim())
    throw std::invalid_argument("derivative_multi: exponent size mismatch");
  SpectralField c = forward_transform(f);
  for (int axis = 0; axis < f.grid.dim(); ++axis)
    if (alpha[axis] > 0) apply_derivative_factor(f.grid, c.coeffs, axis, alpha[axis]);
  return inverse_transform(c);
}

GridField laplacian(const GridField& f) {
  SpectralField c = forward_transform(f);
  const Array ksq = accumulate_axiswise(f.grid, [](int k) { return static_cast<double>(k) * k; });
  c.coeffs *= (-ksq).cast<Complex>();
  return inverse_transform(c);
}

std::vector<GridField> gradient(const GridField& f) {
  SpectralField c = forward_transform(f);
  std::vector<GridField> out;
  out.reserve(f.grid.dim());
  for (int axis = 0; axis < f.grid.dim(); ++axis) {
    ComplexArray work = c.coeffs;
    apply_derivative_factor(f.grid, work, axis, 1);
    SpectralField d{f.grid};
    d.coeffs = std::move(work);
    out.push_back(inverse_transform(d));
  }
  return out;
}

GridField gradient_squared(const GridField& f) {
  GridField out(f.grid);
  for (const GridField& d : gradient(f)) out.samples += d.samples.square();
  return out;
}

GridField resample(const GridField& f, int points_per_axis2) {
  const TorusGrid g2(f.grid.dim(), points_per_axis2);
  SpectralField src = forward_transform(f);
  SpectralField dst(g2);
  const int m = f.grid.dim();
  int idx[kMaxDim];
  for (std::size_t p = 0; p < g2.total_points(); ++p) {
    g2.unflatten(p, idx);
    // Target bin -> wavevector -> source bin (if representable).
    int sidx[kMaxDim];
    Complex v{0.0, 0.0};
    bool present = true;
    bool nyq_fold = false;
    for (int a = 0; a < m; ++a) {
      const int k = g2.wavevector(idx[a]);
      const int n1 = f.grid.points_per_axis();
      if (k < -n1 / 2 || k > n1 / 2 - 1) {
        present = false;
        break;
      }
      if (k == -points_per_axis2 / 2 && points_per_axis2 < n1) nyq_fold = true;
      sidx[a] = k >= 0 ? k : k + n1;
    }
    if (present) {
      v = src.coeffs[f.grid.flat_index(sidx)];
      if (nyq_fold) {
        // Fold the +N2/2 partner in so truncation keeps the field real.
        int pidx[kMaxDim];
        for (int a = 0; a < m; ++a) {
          int k = g2.wavevector(idx[a]);
          if (k == -points_per_axis2 / 2) k = points_per_axis2 / 2;
          pidx[a] = k >= 0 ? k : k + f.grid.points_per_axis();
        }
        v += src.coeffs[f.grid.flat_index(pidx)];
      }
    }
    dst.coeffs[p] = v;
  }
  return inverse_transform(dst);
}

GridField random_band_limited(const TorusGrid& g, int kmax, double amplitude,
                              std::mt19937_64& rng) {
  if (kmax < 0 || kmax >= g.points_per_axis() / 2)
    throw std::invalid_argument("random_band_limited: kmax must satisfy 0 <= kmax < N/2");
  std::normal_distribution<double> gauss(0.0, 1.0);
  SpectralField c(g);
  const int m = g.dim();
  int k[kMaxDim];
  for (int a = 0; a < m; ++a) k[a] = -kmax;
  while (true) {
    // Canonical representative: zero mode, or first nonzero component > 0.
    int first = 0;
    while (first < m && k[first] == 0) ++first;
    double ksq = 0.0;
    for (int a = 0; a < m; ++a) ksq += static_cast<double>(k[a]) * k[a];
    const double sigma = amplitude / (1.0 + ksq);
    if (first == m) {
      c.coeffs[0] = gauss(rng) * sigma;
    } else if (k[first] > 0) {
      const double a = gauss(rng), b = gauss(rng);
      int bin[kMaxDim], nbin[kMaxDim];
      for (int i = 0; i < m; ++i) {
        bin[i] = k[i] >= 0 ? k[i] : k[i] + g.points_per_axis();
        nbin[i] = -k[i] >= 0 ? -k[i] : -k[i] + g.points_per_axis();
      }
      const Complex v = 0.5 * sigma * Complex(a, -b);
      c.coeffs[g.flat_index(bin)] = v;
      c.coeffs[g.flat_index(nbin)] = std::conj(v);
    }
    int axis = m - 1;
    while (axis >= 0 && ++k[axis] > kmax) k[axis--] = -kmax;
    if (axis < 0) break;
  }
  return inverse_transform(c);
}

}  // namespace curveforge
