// Discrete Fourier calculus on the torus: transforms, derivatives, resampling.
//
// Coefficient convention: f(x) = sum_k c_k e^{i k.x} with k per axis in
// {-N/2, ..., N/2 - 1} stored in DFT bin order (0, 1, ..., N/2-1, -N/2, ..., -1).
// For real f the coefficients are conjugate-symmetric, c_{-k} = conj(c_k).
#pragma once

#include <complex>
#include <random>
#include <vector>

#include "curveforge/grid_field.hpp"

namespace curveforge {

struct SpectralField {
  TorusGrid grid;
  ComplexArray coeffs;  // one per grid point, bin order, flat row-major

  SpectralField() = default;
  explicit SpectralField(const TorusGrid& g)
      : grid(g), coeffs(ComplexArray::Zero(g.total_points())) {}
};

// c_k = N^{-m} sum_j f_j e^{-i k.x_j}.
SpectralField forward_transform(const GridField& f);

// f_j = sum_k c_k e^{i k.x_j}.  Throws if the imaginary residue exceeds 1e-9
// (the coefficients did not describe a real field).
GridField inverse_transform(const SpectralField& c);

// Pointwise spectral derivatives (exact on band-limited fields).  Odd-order
// factors zero the Nyquist bin so real fields stay real.
GridField partial_derivative(const GridField& f, int axis, int order = 1);

// d^alpha f for a multi-exponent alpha (alpha[a] = order along axis a).
GridField derivative_multi(const GridField& f, const std::vector<int>& alpha);

// Laplacian multiplier -|k|^2 and gradient components (ik_a f).
GridField laplacian(const GridField& f);
std::vector<GridField> gradient(const GridField& f);

// Pointwise |grad f|^2 = sum_a (df/dx_a)^2.
GridField gradient_squared(const GridField& f);

// Spectral interpolation onto an N2-point grid (zero-pad or truncate bins).
GridField resample(const GridField& f, int points_per_axis2);

// Real band-limited field with |k|_inf <= kmax < N/2: independent N(0,1)
// cos/sin amplitudes per mode, scaled by amplitude / (1 + |k|^2).
GridField random_band_limited(const TorusGrid& g, int kmax, double amplitude,
                              std::mt19937_64& rng);

}  // namespace curveforge
