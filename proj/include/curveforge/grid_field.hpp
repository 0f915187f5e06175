// Real scalar fields sampled on a TorusGrid, and time sequences of them.
#pragma once

#include <Eigen/Dense>

#include "curveforge/torus_grid.hpp"

namespace curveforge {

using Array = Eigen::ArrayXd;
using ComplexArray = Eigen::ArrayXcd;

// Scalar field: one sample per grid point, flat row-major order.
struct GridField {
  TorusGrid grid;
  Array samples;

  GridField() = default;
  explicit GridField(const TorusGrid& g) : grid(g), samples(Array::Zero(g.total_points())) {}
  GridField(const TorusGrid& g, Array s);
};

// Samples f(x) over the grid; fn receives a pointer to dim() coordinates.
template <typename Fn>
GridField sample(const TorusGrid& g, Fn&& fn) {
  GridField out(g);
  double x[kMaxDim];
  for (std::size_t p = 0; p < g.total_points(); ++p) {
    g.coordinates(p, x);
    out.samples[static_cast<Eigen::Index>(p)] = fn(x);
  }
  return out;
}

// Throws std::invalid_argument if any sample is NaN/Inf.
void ensure_finite(const GridField& f, const char* what);

// Scalar field on grid x time nodes.  values(p, j) is the sample at grid
// point p, time node j.  Nodes are strictly increasing and uniformly spaced
// unless `adaptive` is set (stencil operations require uniform spacing).
struct SpaceTimeField {
  TorusGrid grid;
  Eigen::VectorXd time_nodes;
  Eigen::MatrixXd values;  // total_points() x node_count
  bool adaptive = false;

  SpaceTimeField() = default;
  SpaceTimeField(const TorusGrid& g, Eigen::VectorXd nodes);

  int node_count() const { return static_cast<int>(time_nodes.size()); }
  double dt() const;  // uniform spacing; throws if adaptive/non-uniform

  GridField at_node(int j) const;
  void set_node(int j, const GridField& f);
};

// Uniform nodes t_j = t0 + j*(t1-t0)/(count-1), count >= 2.
Eigen::VectorXd uniform_nodes(double t0, double t1, int count);

// Samples f(x, t) over grid x nodes.
template <typename Fn>
SpaceTimeField sample_spacetime(const TorusGrid& g, const Eigen::VectorXd& nodes, Fn&& fn) {
  SpaceTimeField out(g, nodes);
  double x[kMaxDim];
  for (std::size_t p = 0; p < g.total_points(); ++p) {
    g.coordinates(p, x);
    for (int j = 0; j < out.node_count(); ++j)
      out.values(static_cast<Eigen::Index>(p), j) = fn(x, nodes[j]);
  }
  return out;
}

// d^order/dt^order by second-order stencils: central in the interior,
// one-sided at the ends.  order 1 and 2 use direct stencils; higher orders
// compose them.  Requires at least order + 2 nodes and uniform spacing.
SpaceTimeField time_derivative(const SpaceTimeField& u, int order);

// Linear interpolation of f onto new time nodes, which must lie inside f's
// range up to a 1e-9 slack (endpoints clamp).  Exact where nodes coincide.
SpaceTimeField interpolate_time_nodes(const SpaceTimeField& f, const Eigen::VectorXd& nodes);

}  // namespace curveforge
