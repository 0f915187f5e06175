#include "curveforge/grid_field.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace curveforge {

GridField::GridField(const TorusGrid& g, Array s) : grid(g), samples(std::move(s)) {
  if (static_cast<std::size_t>(samples.size()) != g.total_points())
    throw std::invalid_argument("GridField: sample count does not match grid");
}

void ensure_finite(const GridField& f, const char* what) {
  if (!f.samples.isFinite().all())
    throw std::invalid_argument(std::string(what) + ": field contains non-finite samples");
}

SpaceTimeField::SpaceTimeField(const TorusGrid& g, Eigen::VectorXd nodes)
    : grid(g), time_nodes(std::move(nodes)) {
  if (time_nodes.size() < 2)
    throw std::invalid_argument("SpaceTimeField: need at least two time nodes");
  for (int j = 1; j < time_nodes.size(); ++j)
    if (!(time_nodes[j] > time_nodes[j - 1]))
      throw std::invalid_argument("SpaceTimeField: time nodes must be strictly increasing");
  values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.total_points()), time_nodes.size());
}

double SpaceTimeField::dt() const {
  const double step = time_nodes[1] - time_nodes[0];
  if (adaptive)
    throw std::invalid_argument("SpaceTimeField: adaptive node spacing has no single dt");
  for (int j = 1; j < time_nodes.size(); ++j) {
    const double s = time_nodes[j] - time_nodes[j - 1];
    if (std::abs(s - step) > 1e-9 * std::max(1.0, std::abs(step)))
      throw std::invalid_argument("SpaceTimeField: non-uniform time nodes");
  }
  return step;
}

GridField SpaceTimeField::at_node(int j) const {
  if (j < 0 || j >= node_count()) throw std::invalid_argument("SpaceTimeField: node out of range");
  return GridField(grid, values.col(j).array());
}

void SpaceTimeField::set_node(int j, const GridField& f) {
  if (j < 0 || j >= node_count()) throw std::invalid_argument("SpaceTimeField: node out of range");
  if (!(f.grid == grid)) throw std::invalid_argument("SpaceTimeField: grid mismatch");
  values.col(j) = f.samples.matrix();
}

Eigen::VectorXd uniform_nodes(double t0, double t1, int count) {
  if (count < 2 || !(t1 > t0)) throw std::invalid_argument("uniform_nodes: bad range");
  Eigen::VectorXd nodes(count);
  const double step = (t1 - t0) / (count - 1);
  for (int j = 0; j < count; ++j) nodes[j] = t0 + step * j;
  nodes[count - 1] = t1;
  return nodes;
}

namespace {

// First and second time derivatives, second-order accurate everywhere.
Eigen::MatrixXd stencil_derivative(const Eigen::MatrixXd& v, double dt, int order) {
  const Eigen::Index n = v.cols();
  Eigen::MatrixXd d(v.rows(), n);
  if (order == 1) {
    d.col(0) = (-3.0 * v.col(0) + 4.0 * v.col(1) - v.col(2)) / (2.0 * dt);
    for (Eigen::Index j = 1; j + 1 < n; ++j) d.col(j) = (v.col(j + 1) - v.col(j - 1)) / (2.0 * dt);
    d.col(n - 1) = (3.0 * v.col(n - 1) - 4.0 * v.col(n - 2) + v.col(n - 3)) / (2.0 * dt);
  } else {
    const double dt2 = dt * dt;
    d.col(0) = (2.0 * v.col(0) - 5.0 * v.col(1) + 4.0 * v.col(2) - v.col(3)) / dt2;
    for (Eigen::Index j = 1; j + 1 < n; ++j)
      d.col(j) = (v.col(j + 1) - 2.0 * v.col(j) + v.col(j - 1)) / dt2;
    d.col(n - 1) =
        (2.0 * v.col(n - 1) - 5.0 * v.col(n - 2) + 4.0 * v.col(n - 3) - v.col(n - 4)) / dt2;
  }
  return d;
}

}  // namespace

SpaceTimeField interpolate_time_nodes(const SpaceTimeField& f, const Eigen::VectorXd& nodes) {
  if (f.node_count() < 1) throw std::invalid_argument("interpolate_time_nodes: empty field");
  const double lo = f.time_nodes[0], hi = f.time_nodes[f.node_count() - 1];
  const double slack = 1e-9 * std::max(1.0, std::abs(hi));

  SpaceTimeField out(f.grid, nodes);
  for (int j = 0; j < out.node_count(); ++j) {
    const double t = nodes[j];
    if (t < lo - slack || t > hi + slack)
      throw std::invalid_argument("interpolate_time_nodes: node outside the field's range");
    if (t <= lo) {
      out.values.col(j) = f.values.col(0);
      continue;
    }
    if (t >= hi) {
      out.values.col(j) = f.values.col(f.node_count() - 1);
      continue;
    }
    int hi_idx = 1;
    while (f.time_nodes[hi_idx] < t) ++hi_idx;
    const double t0 = f.time_nodes[hi_idx - 1], t1 = f.time_nodes[hi_idx];
    const double w = (t - t0) / (t1 - t0);
    out.values.col(j) = (1.0 - w) * f.values.col(hi_idx - 1) + w * f.values.col(hi_idx);
  }
  return out;
}

SpaceTimeField time_derivative(const SpaceTimeField& u, int order) {
  if (order < 1) throw std::invalid_argument("time_derivative: order must be >= 1");
  if (u.node_count() < order + 2)
    throw std::invalid_argument("time_derivative: need at least order + 2 time nodes");
  const double dt = u.dt();

  SpaceTimeField out = u;
  int remaining = order;
  while (remaining > 0) {
    const int step = remaining >= 2 ? 2 : 1;
    out.values = stencil_derivative(out.values, dt, step);
    remaining -= step;
  }
  return out;
}

}  // namespace curveforge
