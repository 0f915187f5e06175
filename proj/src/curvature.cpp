#include "curveforge/curvature.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace curveforge {

namespace {

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  if (workers == 1 || n < 2048) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  constexpr std::size_t kChunk = 256;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t begin = next.fetch_add(kChunk);
        if (begin >= n) return;
        const std::size_t end = std::min(n, begin + kChunk);
        for (std::size_t i = begin; i < end; ++i) body(i);
      }
    });
  for (std::thread& t : pool) t.join();
}

// Raised symbols at the point plus their stencil derivative along every axis:
// the shared core of the Ricci and Riemann evaluations. The derivatives come
// from compact first- and second-derivative stencils of the packed metric
// components assembled by the product rule — no stencil is ever applied to an
// already-differenced field, which would widen the effective stencil and
// quadruple the truncation constant.
struct ChristoffelJet {
  ChristoffelPoint at;
  double d[kProductDim][kProductDim][kProductDim][kProductDim] = {};  // d[a][r][b][c]
};

ChristoffelJet christoffel_jet(const SampledMetric& metric, std::size_t p) {
  const ProductGrid& g = metric.grid;
  const int dim = g.dim();
  const int n_comp = dim * (dim + 1) / 2;
  constexpr int kSym = kProductDim * (kProductDim + 1) / 2;

  const auto apply = [&](const AxisStencil& st, const Array& f) {
    double v = 0.0;
    for (int i = 0; i < st.count; ++i)
      v += st.weight[i] * f[static_cast<Eigen::Index>(st.node[i])];
    return v;
  };

  AxisStencil d1[kProductDim];
  for (int a = 0; a < dim; ++a) d1[a] = first_derivative_stencil(g, p, a);

  // dK[a][bc] = d_a K_bc and ddK[a][b][cd] = d_a d_b K_cd (compact stencils
  // along one axis, nested first-derivative stencils across distinct axes,
  // which is the standard compact cross stencil).
  double dK[kProductDim][kSym];
  double ddK[kProductDim][kProductDim][kSym];
  for (int c = 0; c < n_comp; ++c) {
    const Array& f = metric.comp[c];
    for (int a = 0; a < dim; ++a) {
      dK[a][c] = apply(d1[a], f);
      ddK[a][a][c] = apply(second_derivative_stencil(g, p, a), f);
      for (int b = a + 1; b < dim; ++b) {
        double v = 0.0;
        for (int i = 0; i < d1[a].count; ++i)
          v += d1[a].weight[i] * apply(first_derivative_stencil(g, d1[a].node[i], b), f);
        ddK[a][b][c] = v;
        ddK[b][a][c] = v;
      }
    }
  }

  ChristoffelJet jet;
  jet.at = christoffel_fd_point(metric, p);

  // d_a of the inverse metric: -K^{re} (d_a K_ef) K^{fd}.
  double dKinv[kProductDim][kProductDim][kProductDim];
  for (int a = 0; a < dim; ++a)
    for (int r = 0; r < dim; ++r)
      for (int s = r; s < dim; ++s) {
        double v = 0.0;
        for (int e = 0; e < dim; ++e)
          for (int f = 0; f < dim; ++f)
            v -= metric.inverse_component(p, r, e) * dK[a][sym_index(e, f, dim)] *
                 metric.inverse_component(p, f, s);
        dKinv[a][r][s] = v;
        dKinv[a][s][r] = v;
      }

  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      for (int c = b; c < dim; ++c) {
        // d_a of the lowered symbol Gamma_{bc|e}, then raise by product rule.
        double dlow[kProductDim];
        for (int e = 0; e < dim; ++e)
          dlow[e] = 0.5 * (ddK[a][c][sym_index(b, e, dim)] + ddK[a][b][sym_index(c, e, dim)] -
                           ddK[a][e][sym_index(b, c, dim)]);
        for (int r = 0; r < dim; ++r) {
          double v = 0.0;
          for (int e = 0; e < dim; ++e)
            v += dKinv[a][r][e] * jet.at.lowered[b][c][e] +
                 metric.inverse_component(p, r, e) * dlow[e];
          jet.d[a][r][b][c] = v;
          jet.d[a][r][c][b] = v;
        }
      }
  return jet;
}

}  // namespace

RicciPoint ricci_fd_point(const SampledMetric& metric, std::size_t p, int first_block) {
  const int d = metric.dim();
  const ChristoffelJet jet = christoffel_jet(metric, p);

  double trace[kProductDim];  // trace[D] = sum_C Gamma^C_DC
  for (int D = 0; D < d; ++D) {
    trace[D] = 0.0;
    for (int C = 0; C < d; ++C) trace[D] += jet.at.raised[C][D][C];
  }

  RicciPoint out;
  out.dim = d;
  for (int A = 0; A < d; ++A)
    for (int B = 0; B < d; ++B) {
      double v = 0.0;
      for (int C = 0; C < d; ++C) v += jet.d[C][C][A][B] - jet.d[B][C][A][C];
      for (int D = 0; D < d; ++D) {
        v += jet.at.raised[D][A][B] * trace[D];
        for (int C = 0; C < d; ++C) v -= jet.at.raised[D][A][C] * jet.at.raised[C][B][D];
      }
      out.ricci[A][B] = v;
    }

  for (int A = 0; A < d; ++A)
    for (int B = 0; B < d; ++B) {
      const double w = metric.inv_comp[sym_index(A, B, d)][static_cast<Eigen::Index>(p)] *
                       out.ricci[A][B];
      out.scalar += w;
      if (A < first_block && B < first_block) out.first_trace += w;
      if (A >= first_block && B >= first_block) out.second_trace += w;
    }
  return out;
}

RiemannPoint riemann_fd_point(const SampledMetric& metric, std::size_t p) {
  const int d = metric.dim();
  const ChristoffelJet jet = christoffel_jet(metric, p);

  RiemannPoint out;
  out.dim = d;
  for (int r = 0; r < d; ++r)
    for (int q = 0; q < d; ++q)
      for (int pp = 0; pp < q; ++pp)
        for (int i = 0; i < d; ++i) {
          double v = jet.d[pp][r][q][i] - jet.d[q][r][pp][i];
          for (int s = 0; s < d; ++s)
            v += jet.at.raised[r][pp][s] * jet.at.raised[s][q][i] -
                 jet.at.raised[r][q][s] * jet.at.raised[s][pp][i];
          out.riem[r][pp][q][i] = v;
          out.riem[r][q][pp][i] = -v;
        }
  return out;
}

Array scalar_curvature_fd(const SampledMetric& metric) {
  Array out(metric.grid.total_points());
  parallel_for(metric.grid.total_points(), [&](std::size_t p) {
    out[static_cast<Eigen::Index>(p)] = ricci_fd_point(metric, p, metric.dim()).scalar;
  });
  return out;
}

TraceFields partial_traces_fd(const SampledMetric& metric, int first_block) {
  TraceFields out{Array(metric.grid.total_points()), Array(metric.grid.total_points())};
  parallel_for(metric.grid.total_points(), [&](std::size_t p) {
    const RicciPoint r = ricci_fd_point(metric, p, first_block);
    out.first[static_cast<Eigen::Index>(p)] = r.first_trace;
    out.second[static_cast<Eigen::Index>(p)] = r.second_trace;
  });
  return out;
}

namespace {

// lap / gsq of u restricted to one factor's axes, on the product grid.
void factor_operators(const ProductGrid& pg, const Array& u, int a_begin, int a_end, Array& lap,
                      Array& gsq) {
  lap = Array::Zero(u.size());
  gsq = Array::Zero(u.size());
  for (int a = a_begin; a < a_end; ++a) {
    lap += axis_derivative(pg, u, a, 2);
    gsq += axis_derivative(pg, u, a, 1).square();
  }
}

}  // namespace

Array scalar_curvature_formula(const ProductManifoldSpec& spec, const Array& u) {
  return scalar_curvature_formula(spec, u, FormulaOptions{});
}

Array scalar_curvature_formula(const ProductManifoldSpec& spec, const Array& u,
                               const FormulaOptions& opts) {
  if (!spec.h_is_flat())
    throw std::invalid_argument("scalar_curvature_formula: second factor must be flat");
  if (!spec.g_is_flat() && opts.phi_g.size() == 0)
    throw std::invalid_argument(
        "scalar_curvature_formula: curved first factor requires its conformal exponent");

  const ProductGrid pg = spec.product_grid();
  if (static_cast<std::size_t>(u.size()) != pg.total_points())
    throw std::invalid_argument("scalar_curvature_formula: u size mismatch");
  const int m = spec.m, n = spec.n;

  Array lap_g, gsq_g, lap_h, gsq_h;
  factor_operators(pg, u, 0, m, lap_g, gsq_g);
  factor_operators(pg, u, m, m + n, lap_h, gsq_h);

  Array R_g = Array::Zero(u.size());
  if (opts.phi_g.size() != 0) {
    const ProductGrid fg = spec.factor_grid_m();
    if (static_cast<std::size_t>(opts.phi_g.size()) != fg.total_points())
      throw std::invalid_argument("scalar_curvature_formula: phi_g size mismatch");
    R_g = broadcast_first_factor(spec, conformal_scalar_curvature(fg, opts.phi_g));
    const Array phi = broadcast_first_factor(spec, opts.phi_g);
    Array dot = Array::Zero(u.size());
    for (int a = 0; a < m; ++a)
      dot += axis_derivative(pg, phi, a, 1) * axis_derivative(pg, u, a, 1);
    const Array shrink = (-2.0 * phi).exp();
    lap_g = shrink * (lap_g + (m - 2) * dot);
    gsq_g = shrink * gsq_g;
  }

  const Array eg = (-2.0 * n * u).exp();
  const Array eh = (2.0 * m * u).exp();
  const double cg = n * (n * m + 2 * n + m * m);
  const double ch = m * (n * m + 2 * m + n * n);
  return eg * R_g + 2.0 * n * eg * lap_g - 2.0 * m * eh * lap_h - cg * eg * gsq_g -
         ch * eh * gsq_h;
}

TraceFields sectional_traces(const ProductManifoldSpec& spec, const Array& u) {
  if (!spec.g_is_flat() || !spec.h_is_flat())
    throw std::invalid_argument("sectional_traces: requires flat factor metrics");
  const ProductGrid pg = spec.product_grid();
  if (static_cast<std::size_t>(u.size()) != pg.total_points())
    throw std::invalid_argument("sectional_traces: u size mismatch");
  const int m = spec.m, n = spec.n;

  Array lap_g, gsq_g, lap_h, gsq_h;
  factor_operators(pg, u, 0, m, lap_g, gsq_g);
  factor_operators(pg, u, m, m + n, lap_h, gsq_h);

  // Trace of the Ricci tensor over one factor block, in terms of that block's
  // dimension d1, the other's d2, and the two factor Laplacians / gradients.
  const auto block_trace = [](double d1, double d2, const Array& w, const Array& lap1,
                              const Array& gsq1, const Array& lap2, const Array& gsq2) -> Array {
    const Array down = (-2.0 * d2 * w).exp();
    const Array up = (2.0 * d1 * w).exp();
    return (2.0 - d1) * d2 * down * lap1 - d1 * d2 * up * lap2 -
           d2 * (d1 * d1 + 2.0 * d2 - d1 * d2) * down * gsq1 - 2.0 * d1 * d1 * d2 * up * gsq2;
  };

  TraceFields out;
  out.first = block_trace(m, n, u, lap_g, gsq_g, lap_h, gsq_h);
  out.second = block_trace(n, m, -u, -lap_h, gsq_h, -lap_g, gsq_g);
  return out;
}

double max_curvature_gap(const ProductManifoldSpec& spec, const Array& u) {
  return max_curvature_gap(spec, u, FormulaOptions{});
}

double max_curvature_gap(const ProductManifoldSpec& spec, const Array& u,
                         const FormulaOptions& opts) {
  const DeformedMetric dm = assemble_deformed_metric(spec, u);
  const Array fd = scalar_curvature_fd(dm.metric);
  const Array closed = scalar_curvature_formula(spec, u, opts);
  const auto mask = interior_mask(dm.metric.grid, 2);
  double gap = 0.0;
  for (Eigen::Index i = 0; i < fd.size(); ++i)
    if (mask[i]) gap = std::max(gap, std::abs(fd[i] - closed[i]));
  return gap;
}

}  // namespace curveforge
