#include "curveforge/norms.hpp"

#include <cmath>
#include <stdexcept>

namespace curveforge {

namespace {

// Visits every exponent vector alpha >= 0 with |alpha| = j over `dim` axes,
// passing the multinomial weight j! / prod(alpha_a!).
template <typename Fn>
void for_each_multiset(int dim, int j, Fn&& fn) {
  std::vector<int> alpha(dim, 0);
  double factorial_j = 1.0;
  for (int i = 2; i <= j; ++i) factorial_j *= i;

  // Recursive distribution of j derivative orders over the axes.
  auto rec = [&](auto&& self, int axis, int remaining) -> void {
    if (axis == dim - 1) {
      alpha[axis] = remaining;
      double denom = 1.0;
      for (int a = 0; a < dim; ++a)
        for (int i = 2; i <= alpha[a]; ++i) denom *= i;
      fn(alpha, factorial_j / denom);
      return;
    }
    for (int take = 0; take <= remaining; ++take) {
      alpha[axis] = take;
      self(self, axis + 1, remaining - take);
    }
  };
  rec(rec, 0, j);
}

}  // namespace

double integrate(const GridField& f) {
  return std::pow(f.grid.spacing(), f.grid.dim()) * f.samples.sum();
}

double l2_norm(const GridField& f) {
  return std::sqrt(std::pow(f.grid.spacing(), f.grid.dim()) * f.samples.square().sum());
}

double sobolev_norm(const GridField& f, int s) {
  if (s < 0 || s > f.grid.points_per_axis() / 2)
    throw std::invalid_argument("sobolev_norm: order not resolvable on this grid");
  SpectralField c = forward_transform(f);
  const TorusGrid& g = f.grid;
  const int m = g.dim();
  int idx[kMaxDim];
  double acc = 0.0;
  for (std::size_t p = 0; p < g.total_points(); ++p) {
    g.unflatten(p, idx);
    double ksq = 0.0;
    for (int a = 0; a < m; ++a) {
      const double k = g.wavevector(idx[a]);
      ksq += k * k;
    }
    double weight = 1.0, pw = 1.0;
    for (int j = 1; j <= s; ++j) {
      pw *= ksq;
      weight += pw;
    }
    acc += weight * std::norm(c.coeffs[p]);
  }
  return std::sqrt(acc * g.volume());
}

GridField grad_order_squared(const GridField& f, int j) {
  if (j < 0) throw std::invalid_argument("grad_order_squared: negative order");
  GridField out(f.grid);
  if (j == 0) {
    out.samples = f.samples.square();
    return out;
  }
  for_each_multiset(f.grid.dim(), j, [&](const std::vector<int>& alpha, double weight) {
    out.samples += weight * derivative_multi(f, alpha).samples.square();
  });
  return out;
}

double c0_norm(const GridField& f) { return f.samples.abs().maxCoeff(); }

double ck_norm(const GridField& f, int k) {
  if (k < 0 || k > f.grid.points_per_axis() / 2)
    throw std::invalid_argument("ck_norm: order not resolvable on this grid");
  double acc = 0.0;
  for (int j = 0; j <= k; ++j) acc += grad_order_squared(f, j).samples.maxCoeff();
  return std::sqrt(acc);
}

double sup_time_sobolev(const SpaceTimeField& u, int s) {
  double best = 0.0;
  for (int j = 0; j < u.node_count(); ++j) best = std::max(best, sobolev_norm(u.at_node(j), s));
  return best;
}

double sobolev_norm_spacetime(const SpaceTimeField& u, int i, int s) {
  if (i < 0) throw std::invalid_argument("sobolev_norm_spacetime: negative time order");
  double acc = 0.0;
  SpaceTimeField cur = u;
  for (int j = 0; j <= i; ++j) {
    const double sup = sup_time_sobolev(cur, s);
    acc += sup * sup;
    if (j < i) cur = time_derivative(cur, 1);
  }
  return std::sqrt(acc);
}

double integrate_time(const Eigen::VectorXd& nodes, const Eigen::VectorXd& values) {
  if (nodes.size() != values.size() || nodes.size() < 2)
    throw std::invalid_argument("integrate_time: size mismatch");
  double acc = 0.0;
  for (int j = 1; j < nodes.size(); ++j)
    acc += 0.5 * (values[j] + values[j - 1]) * (nodes[j] - nodes[j - 1]);
  return acc;
}

}  // namespace curveforge
