#include "curveforge/metric_fields.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace curveforge {

namespace {

using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kProductDim, kProductDim>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

SampledMetric make_metric(const ProductGrid& g, std::vector<Array> comps) {
  const int d = g.dim();
  const int packed = d * (d + 1) / 2;
  if (static_cast<int>(comps.size()) != packed)
    throw std::invalid_argument("make_metric: wrong component count");
  for (const Array& c : comps)
    if (static_cast<std::size_t>(c.size()) != g.total_points())
      throw std::invalid_argument("make_metric: component size mismatch");

  SampledMetric out;
  out.grid = g;
  out.comp = std::move(comps);
  out.inv_comp.assign(packed, Array(g.total_points()));
  out.det = Array(g.total_points());

  SmallMatrix K(d, d), Kinv(d, d);
  for (std::size_t p = 0; p < g.total_points(); ++p) {
    for (int A = 0; A < d; ++A)
      for (int B = A; B < d; ++B)
        K(A, B) = K(B, A) = out.comp[sym_index(A, B, d)][static_cast<Eigen::Index>(p)];
    // Positive definiteness: Cholesky of K - tol*I must succeed.
    Eigen::LLT<SmallMatrix> llt(K - 1e-10 * SmallMatrix::Identity(d, d));
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument("make_metric: matrix not positive definite at a grid point");
    Kinv = K.inverse();
    for (int A = 0; A < d; ++A)
      for (int B = A; B < d; ++B)
        out.inv_comp[sym_index(A, B, d)][static_cast<Eigen::Index>(p)] = Kinv(A, B);
    out.det[static_cast<Eigen::Index>(p)] = K.determinant();
  }
  return out;
}

std::vector<Array> identity_metric_comps(const ProductGrid& g) {
  const int d = g.dim();
  std::vector<Array> comps(d * (d + 1) / 2, Array::Zero(g.total_points()));
  for (int A = 0; A < d; ++A) comps[sym_index(A, A, d)] = Array::Ones(g.total_points());
  return comps;
}

std::vector<Array> conformal_metric_comps(const ProductGrid& g, const Array& phi) {
  if (static_cast<std::size_t>(phi.size()) != g.total_points())
    throw std::invalid_argument("conformal_metric_comps: phi size mismatch");
  const int d = g.dim();
  std::vector<Array> comps(d * (d + 1) / 2, Array::Zero(g.total_points()));
  const Array factor = (2.0 * phi).exp();
  for (int A = 0; A < d; ++A) comps[sym_index(A, A, d)] = factor;
  return comps;
}

Array conformal_scalar_curvature(const ProductGrid& g, const Array& phi) {
  const int d = g.dim();
  Array lap = Array::Zero(g.total_points());
  Array gradsq = Array::Zero(g.total_points());
  for (int a = 0; a < d; ++a) {
    lap += spectral_axis_derivative(g, phi, a, 2);
    gradsq += spectral_axis_derivative(g, phi, a, 1).square();
  }
  return (-2.0 * phi).exp() * (-2.0 * (d - 1) * lap - (d - 1) * (d - 2) * gradsq);
}

ProductGrid ProductManifoldSpec::product_grid() const {
  std::vector<AxisSpec> axes;
  for (int a = 0; a < m; ++a) axes.push_back({points_per_axis, kTwoPi, true});
  if (n == 1) {
    axes.push_back({points_per_axis + 1, interval_length, false});
  } else {
    for (int a = 0; a < n; ++a) axes.push_back({points_per_axis, kTwoPi, true});
  }
  return ProductGrid(axes);
}

ProductGrid ProductManifoldSpec::factor_grid_m() const {
  std::vector<AxisSpec> axes(m, AxisSpec{points_per_axis, kTwoPi, true});
  return ProductGrid(axes);
}

ProductGrid ProductManifoldSpec::factor_grid_n() const {
  if (n == 1) return ProductGrid({AxisSpec{points_per_axis + 1, interval_length, false}});
  std::vector<AxisSpec> axes(n, AxisSpec{points_per_axis, kTwoPi, true});
  return ProductGrid(axes);
}

Array broadcast_first_factor(const ProductManifoldSpec& spec, const Array& field_m) {
  const ProductGrid pg = spec.product_grid();
  const std::size_t n_total = spec.factor_grid_n().total_points();
  Array out(pg.total_points());
  for (std::size_t p = 0; p < pg.total_points(); ++p)
    out[static_cast<Eigen::Index>(p)] = field_m[static_cast<Eigen::Index>(p / n_total)];
  return out;
}

Array broadcast_second_factor(const ProductManifoldSpec& spec, const Array& field_n) {
  const ProductGrid pg = spec.product_grid();
  const std::size_t n_total = spec.factor_grid_n().total_points();
  Array out(pg.total_points());
  for (std::size_t p = 0; p < pg.total_points(); ++p)
    out[static_cast<Eigen::Index>(p)] = field_n[static_cast<Eigen::Index>(p % n_total)];
  return out;
}

DeformedMetric assemble_deformed_metric(const ProductManifoldSpec& spec, const Array& u) {
  if (spec.m < 1 || spec.m > 3 || spec.n < 1 || spec.n > 2)
    throw std::invalid_argument("assemble_deformed_metric: need 1 <= m <= 3, 1 <= n <= 2");
  const ProductGrid pg = spec.product_grid();
  if (static_cast<std::size_t>(u.size()) != pg.total_points())
    throw std::invalid_argument("assemble_deformed_metric: u size mismatch");
  if (!u.isFinite().all())
    throw std::invalid_argument("assemble_deformed_metric: u contains non-finite samples");

  const int d = pg.dim();
  const int m = spec.m, n = spec.n;
  const std::size_t n_total = spec.factor_grid_n().total_points();

  // Factor metrics (possibly curved) with their own inverses/determinants.
  const SampledMetric gm = make_metric(
      spec.factor_grid_m(), spec.g_is_flat() ? identity_metric_comps(spec.factor_grid_m())
                                             : spec.g_comp);
  const SampledMetric hn = make_metric(
      spec.factor_grid_n(), spec.h_is_flat() ? identity_metric_comps(spec.factor_grid_n())
                                             : spec.h_comp);

  const Array up = (2.0 * n * u).exp();    // rho^n
  const Array down = (-2.0 * m * u).exp(); // rho^{-m}

  DeformedMetric out;
  out.spec = spec;
  out.u = u;
  out.metric.grid = pg;
  const int packed = d * (d + 1) / 2;
  out.metric.comp.assign(packed, Array::Zero(pg.total_points()));
  out.metric.inv_comp.assign(packed, Array::Zero(pg.total_points()));
  out.metric.det = Array(pg.total_points());

  SmallMatrix K(d, d);
  for (std::size_t p = 0; p < pg.total_points(); ++p) {
    const auto pi = static_cast<Eigen::Index>(p);
    const std::size_t px = p / n_total, py = p % n_total;
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        out.metric.comp[sym_index(i, j, d)][pi] = up[pi] * gm.component(px, i, j);
        out.metric.inv_comp[sym_index(i, j, d)][pi] = gm.inverse_component(px, i, j) / up[pi];
      }
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) {
        out.metric.comp[sym_index(m + a, m + b, d)][pi] = down[pi] * hn.component(py, a, b);
        out.metric.inv_comp[sym_index(m + a, m + b, d)][pi] =
            hn.inverse_component(py, a, b) / down[pi];
      }

    // Volume preservation: the determinant of the assembled matrix (computed
    // numerically, not via the block shortcut) must equal det g * det h.
    for (int A = 0; A < d; ++A)
      for (int B = A; B < d; ++B)
        K(A, B) = K(B, A) = out.metric.comp[sym_index(A, B, d)][pi];
    const double detK = K.determinant();
    out.metric.det[pi] = detK;
    const double want = gm.det[static_cast<Eigen::Index>(px)] * hn.det[static_cast<Eigen::Index>(py)];
    if (std::abs(detK - want) > 1e-10 * std::abs(want))
      throw std::runtime_error("assemble_deformed_metric: det K != det g * det h");
  }
  return out;
}

}  // namespace curveforge
