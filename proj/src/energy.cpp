#include "curveforge/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace curveforge {

namespace {

void check_shared_grid(const GridField& u, const GridField& ut, const GridField& v) {
  if (!(u.grid == ut.grid) || !(u.grid == v.grid))
    throw std::invalid_argument("energy: fields must share one grid");
  if (u.grid.dim() < 1 || u.grid.dim() > 3)
    throw std::invalid_argument("energy: torus dimension must be 1..3");
}

}  // namespace

EnergyPair energy_components(const GridField& u, const GridField& ut, const GridField& v, int l) {
  check_shared_grid(u, ut, v);
  if (l < 1) throw std::invalid_argument("energy_components: order must be >= 1");
  const int m = u.grid.dim();
  const Array grad_u = grad_order_squared(u, l).samples;
  const Array grad_ut = grad_order_squared(ut, l - 1).samples;
  const Array weight = (2.0 * (m + 1) * v.samples).exp();

  GridField integrand(u.grid);
  EnergyPair out;
  integrand.samples = 0.5 * (grad_u + m * weight * grad_ut);
  out.first = integrate(integrand);
  integrand.samples = 0.5 * (grad_u / weight + m * grad_ut);
  out.second = integrate(integrand);
  return out;
}

double total_energy(const GridField& u, const GridField& ut, const GridField& v, int s) {
  if (s < 1) throw std::invalid_argument("total_energy: order must be >= 1");
  double e = 0.0;
  for (int l = 1; l <= s; ++l) {
    const EnergyPair pair = energy_components(u, ut, v, l);
    e += pair.first + pair.second;
  }
  const double l2 = l2_norm(u);
  return e + 0.5 * l2 * l2;
}

EnergyTrace energy_trace(const SpaceTimeField& u, const SpaceTimeField& ut,
                         const SpaceTimeField& v, int s) {
  if (u.node_count() != ut.node_count() || u.node_count() != v.node_count())
    throw std::invalid_argument("energy_trace: node counts differ");
  if ((u.time_nodes - ut.time_nodes).cwiseAbs().maxCoeff() > 1e-12 ||
      (u.time_nodes - v.time_nodes).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("energy_trace: time nodes differ");

  EnergyTrace trace;
  trace.order = s;
  trace.times = u.time_nodes;
  trace.sqrt_energy.resize(u.node_count());
  for (int j = 0; j < u.node_count(); ++j)
    trace.sqrt_energy[j] = std::sqrt(total_energy(u.at_node(j), ut.at_node(j), v.at_node(j), s));
  return trace;
}

double norm_energy_bridge_bound(int m, double v_c0) {
  if (m < 1 || m > 3) throw std::invalid_argument("norm_energy_bridge_bound: m must be 1..3");
  const double stretch = std::max(1.0, std::exp((m + 1) * v_c0));
  return std::sqrt(2.0) * (stretch + 1.0 / std::sqrt(static_cast<double>(m)));
}

BridgeCheck norm_energy_bridge(const GridField& u, const GridField& ut, const GridField& v,
                               int s) {
  check_shared_grid(u, ut, v);
  if (s < 1) throw std::invalid_argument("norm_energy_bridge: order must be >= 1");
  BridgeCheck out;
  const double nu = sobolev_norm(u, s);
  const double nv = sobolev_norm(ut, s - 1);
  out.norm = std::sqrt(nu * nu + nv * nv);
  out.sqrt_energy = std::sqrt(total_energy(u, ut, v, s));
  out.bound = norm_energy_bridge_bound(u.grid.dim(), c0_norm(v));
  if (out.norm == 0.0 && out.sqrt_energy == 0.0) {
    out.pass = true;
  } else if (out.norm == 0.0 || out.sqrt_energy == 0.0) {
    out.pass = false;  // one side vanished while the other did not
  } else {
    out.pass = out.norm <= out.bound * out.sqrt_energy &&
               out.sqrt_energy <= out.bound * out.norm;
  }
  return out;
}

double data_quantity(const SpaceTimeField& target, int s) {
  return sup_time_sobolev(target, s - 1);
}

double data_quantity(const SpaceTimeField& target, const GridField& background, int s) {
  return sup_time_sobolev(target, s - 1) + sobolev_norm(background, s - 1);
}

GronwallReport gronwall_check(const EnergyTrace& trace, double a_s) {
  const int n = static_cast<int>(trace.times.size());
  if (n < 3) throw std::invalid_argument("gronwall_check: need at least three nodes");
  if (!trace.sqrt_energy.allFinite())
    throw std::invalid_argument("gronwall_check: non-finite energy trace");

  GronwallReport out;
  out.rate = -std::numeric_limits<double>::infinity();
  for (int i = 1; i + 1 < n; ++i) {
    const double rate = (trace.sqrt_energy[i + 1] - trace.sqrt_energy[i - 1]) /
                        (trace.times[i + 1] - trace.times[i - 1]);
    out.rate = std::max(out.rate, rate / (a_s + trace.sqrt_energy[i] + 1e-14));
  }

  const double relaxed = out.rate >= 0.0 ? out.rate * 1.05 : out.rate / 1.05;
  const double e0 = trace.sqrt_energy[0];
  out.worst_margin = -std::numeric_limits<double>::infinity();
  bool pass = true;
  for (int i = 0; i < n; ++i) {
    const double envelope = (e0 + a_s) * std::exp(relaxed * trace.times[i]) - a_s;
    const double margin = trace.sqrt_energy[i] - envelope;
    out.worst_margin = std::max(out.worst_margin, margin);
    if (margin > 1e-12) pass = false;
  }
  out.pass = pass;
  return out;
}

}  // namespace curveforge
