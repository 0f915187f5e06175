// Weighted energy functionals for torus fields u(t) with velocity u_t, taken
// against a background field v (the linearization point):
//
//   E1^(l) = 1/2 int |grad^l u|^2 + m e^{ 2(m+1)v} |grad^{l-1} u_t|^2
//   E2^(l) = 1/2 int e^{-2(m+1)v} |grad^l u|^2 + m |grad^{l-1} u_t|^2
//   E_s    = sum_{l=1..s} (E1^(l) + E2^(l)) + 1/2 int u^2
//
// with m the torus dimension. The module also provides the two-sided bridge
// between sqrt(E_s) and the H^s x H^{s-1} norm of (u, u_t), the data quantity
// A_s entering growth estimates, and an a-posteriori Gronwall consistency
// check of recorded energy traces.
#pragma once

#include "curveforge/norms.hpp"

namespace curveforge {

struct EnergyPair {
  double first = 0.0;   // E1^(l)
  double second = 0.0;  // E2^(l)
};

// Requires l >= 1; u, ut, v share one torus grid of dimension 1..3.
EnergyPair energy_components(const GridField& u, const GridField& ut, const GridField& v, int l);

// E_s for s >= 1.
double total_energy(const GridField& u, const GridField& ut, const GridField& v, int s);

struct EnergyTrace {
  int order = 0;  // s
  Eigen::VectorXd times;
  Eigen::VectorXd sqrt_energy;  // sqrt(E_s) per node
};

// Evaluates sqrt(E_s(t)) at every shared time node.
EnergyTrace energy_trace(const SpaceTimeField& u, const SpaceTimeField& ut,
                         const SpaceTimeField& v, int s);

// Constant of the two-sided comparison between sqrt(E_s) and
// sqrt(|u|_{H^s}^2 + |u_t|_{H^{s-1}}^2):
//   bound = sqrt(2) (max(1, e^{(m+1) |v|_C0}) + 1/sqrt(m)),
// valid for torus dimensions m = 1..3.
double norm_energy_bridge_bound(int m, double v_c0);

struct BridgeCheck {
  double norm = 0.0;         // sqrt(|u|_{H^s}^2 + |u_t|_{H^{s-1}}^2)
  double sqrt_energy = 0.0;  // sqrt(E_s)
  double bound = 0.0;
  bool pass = false;  // both ratios stay below the bound
};

BridgeCheck norm_energy_bridge(const GridField& u, const GridField& ut, const GridField& v, int s);

// Data size A_s = sup_t |target(t)|_{H^{s-1}} + |background(x)|_{H^{s-1}}
// driving the growth estimates (the background term is optional).
double data_quantity(const SpaceTimeField& target, int s);
double data_quantity(const SpaceTimeField& target, const GridField& background, int s);

// A-posteriori consistency: estimate the worst relative growth rate
//   Lambda = max over interior nodes of [d/dt sqrt(E_s)] / (A_s + sqrt(E_s))
// from centred differences, then demand that the whole trace sits under its
// own Gronwall envelope (sqrt(E_s)(0) + A_s) e^{Lambda' t} - A_s, where
// Lambda' relaxes Lambda by 5% away from the trace (times 1.05 for growth,
// divided for decay) plus an absolute slack of 1e-12.
struct GronwallReport {
  double rate = 0.0;          // Lambda
  double worst_margin = 0.0;  // max over nodes of sqrt(E_s) - envelope
  bool pass = false;
};

GronwallReport gronwall_check(const EnergyTrace& trace, double a_s);

}  // namespace curveforge
