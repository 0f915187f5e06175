#include "curveforge/christoffel.hpp"

#include <cmath>
#include <stdexcept>

namespace curveforge {

ChristoffelPoint christoffel_fd_point(const SampledMetric& metric, std::size_t p) {
  const ProductGrid& g = metric.grid;
  const int d = g.dim();

  // dK[C][sym_index(B,D)] = d_C K_BD at p.
  double dK[kProductDim][kProductDim * (kProductDim + 1) / 2];
  const int packed = d * (d + 1) / 2;
  for (int C = 0; C < d; ++C)
    for (int s = 0; s < packed; ++s) dK[C][s] = stencil_derivative_at(g, metric.comp[s], p, C);

  ChristoffelPoint out;
  out.dim = d;
  for (int B = 0; B < d; ++B)
    for (int C = B; C < d; ++C)
      for (int D = 0; D < d; ++D) {
        const double v = 0.5 * (dK[C][sym_index(B, D, d)] + dK[B][sym_index(C, D, d)] -
                                dK[D][sym_index(B, C, d)]);
        out.lowered[B][C][D] = v;
        out.lowered[C][B][D] = v;
      }
  for (int A = 0; A < d; ++A)
    for (int B = 0; B < d; ++B)
      for (int C = B; C < d; ++C) {
        double v = 0.0;
        for (int D = 0; D < d; ++D)
          v += metric.inv_comp[sym_index(A, D, d)][static_cast<Eigen::Index>(p)] *
               out.lowered[B][C][D];
        out.raised[A][B][C] = v;
        out.raised[A][C][B] = v;
      }
  return out;
}

DeformationDerivs deformation_derivs(const ProductManifoldSpec& spec, const Array& u) {
  DeformationDerivs out;
  out.grid = spec.product_grid();
  if (static_cast<std::size_t>(u.size()) != out.grid.total_points())
    throw std::invalid_argument("deformation_derivs: u size mismatch");
  out.u = u;
  out.du.reserve(out.grid.dim());
  for (int a = 0; a < out.grid.dim(); ++a) out.du.push_back(axis_derivative(out.grid, u, a, 1));
  return out;
}

ChristoffelPoint christoffel_closed_form_point(const ProductManifoldSpec& spec,
                                               const DeformationDerivs& derivs, std::size_t p) {
  if (!spec.g_is_flat() || !spec.h_is_flat())
    throw std::invalid_argument("christoffel_closed_form_point: requires flat factor metrics");

  const int m = spec.m, n = spec.n, d = m + n;
  const auto pi = static_cast<Eigen::Index>(p);
  const double u = derivs.u[pi];
  const double eg = std::exp(2.0 * n * u);    // weight on the first block
  const double eh = std::exp(-2.0 * m * u);   // weight on the second block
  double ux[kProductDim] = {}, uy[kProductDim] = {};
  for (int i = 0; i < m; ++i) ux[i] = derivs.deriv(p, i);
  for (int a = 0; a < n; ++a) uy[a] = derivs.deriv(p, m + a);

  const auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };

  ChristoffelPoint out;
  out.dim = d;

  // Lowered symbols, by block membership of (B, C | D).
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k)
        out.lowered[i][j][k] =
            n * eg * (ux[j] * delta(i, k) + ux[i] * delta(j, k) - ux[k] * delta(i, j));
      for (int a = 0; a < n; ++a) out.lowered[i][j][m + a] = -n * eg * uy[a] * delta(i, j);
    }
  for (int a = 0; a < n; ++a)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        out.lowered[m + a][j][k] = n * eg * uy[a] * delta(j, k);
        out.lowered[j][m + a][k] = out.lowered[m + a][j][k];
      }
  for (int i = 0; i < m; ++i)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        out.lowered[i][m + b][m + c] = -m * eh * ux[i] * delta(b, c);
        out.lowered[m + b][i][m + c] = out.lowered[i][m + b][m + c];
      }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      for (int k = 0; k < m; ++k) out.lowered[m + a][m + b][k] = m * eh * ux[k] * delta(a, b);
      for (int c = 0; c < n; ++c)
        out.lowered[m + a][m + b][m + c] =
            -m * eh * (uy[b] * delta(a, c) + uy[a] * delta(b, c) - uy[c] * delta(a, b));
    }

  // Raised symbols: the block weights cancel or combine into e^{+-2(m+n)u}.
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k)
        out.raised[k][i][j] =
            n * (ux[j] * delta(i, k) + ux[i] * delta(j, k) - ux[k] * delta(i, j));
      for (int a = 0; a < n; ++a) out.raised[m + a][i][j] = -n * (eg / eh) * uy[a] * delta(i, j);
    }
  for (int a = 0; a < n; ++a)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        out.raised[k][m + a][j] = n * uy[a] * delta(j, k);
        out.raised[k][j][m + a] = out.raised[k][m + a][j];
      }
  for (int i = 0; i < m; ++i)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        out.raised[m + c][i][m + b] = -m * ux[i] * delta(c, b);
        out.raised[m + c][m + b][i] = out.raised[m + c][i][m + b];
      }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      for (int k = 0; k < m; ++k) out.raised[k][m + a][m + b] = m * (eh / eg) * ux[k] * delta(a, b);
      for (int c = 0; c < n; ++c)
        out.raised[m + c][m + a][m + b] =
            -m * (uy[b] * delta(a, c) + uy[a] * delta(b, c) - uy[c] * delta(a, b));
    }

  return out;
}

double christoffel_trace_residual(const ChristoffelPoint& ch) {
  double r = 0.0;
  for (int B = 0; B < ch.dim; ++B) {
    double tr = 0.0;
    for (int A = 0; A < ch.dim; ++A) tr += ch.raised[A][B][A];
    r += std::abs(tr);
  }
  return r;
}

}  // namespace curveforge
