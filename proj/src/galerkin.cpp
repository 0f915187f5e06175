#include "curveforge/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace curveforge {

namespace {

double quadrature_weight(const TorusGrid& g) {
  return g.volume() / static_cast<double>(g.total_points());
}

// Coefficient-space H^s weight for a (-lap) eigenvalue.
double sobolev_weight(double lambda, int s) {
  double w = 1.0, pw = 1.0;
  for (int j = 1; j <= s; ++j) {
    pw *= lambda;
    w += pw;
  }
  return w;
}

std::int64_t mode_key(const SpectralBasis::Mode& m) {
  // kmax < 256 in practice; pack kind and the three components.
  std::int64_t key = m.kind;
  for (int a = 0; a < 3; ++a) key = key * 2048 + (m.k[a] + 1024);
  return key;
}

}  // namespace

double SpectralBasis::max_lambda() const {
  double v = 0.0;
  for (const Mode& m : modes) v = std::max(v, m.lambda);
  return v;
}

Eigen::MatrixXd SpectralBasis::sample_on(const TorusGrid& g) const {
  if (g.dim() != grid.dim()) throw std::invalid_argument("sample_on: dimension mismatch");
  const double volume = grid.volume();
  Eigen::MatrixXd out(g.total_points(), size());
  double x[kMaxDim];
  for (std::size_t p = 0; p < g.total_points(); ++p) {
    g.coordinates(p, x);
    for (int i = 0; i < size(); ++i) {
      const Mode& m = modes[i];
      double phase = 0.0;
      for (int a = 0; a < g.dim(); ++a) phase += m.k[a] * x[a];
      double v = 0.0;
      switch (m.kind) {
        case kConstant: v = 1.0 / std::sqrt(volume); break;
        case kCos: v = std::sqrt(2.0 / volume) * std::cos(phase); break;
        case kSin: v = std::sqrt(2.0 / volume) * std::sin(phase); break;
      }
      out(static_cast<Eigen::Index>(p), i) = v;
    }
  }
  return out;
}

SpectralBasis make_basis(const TorusGrid& grid, int kmax) {
  if (grid.dim() < 1 || grid.dim() > 3)
    throw std::invalid_argument("make_basis: torus dimension must be 1..3");
  if (kmax < 0) throw std::invalid_argument("make_basis: kmax must be non-negative");
  if (grid.points_per_axis() < 2 * kmax + 2)
    throw std::invalid_argument("make_basis: need at least 2*kmax + 2 points per axis");

  SpectralBasis basis;
  basis.grid = grid;
  basis.kmax = kmax;
  basis.modes.push_back(SpectralBasis::Mode{});  // constant mode

  const int m = grid.dim();
  std::array<int, 3> k = {-kmax, 0, 0};
  for (int a = 1; a < m; ++a) k[a] = -kmax;
  for (;;) {
    int first_nonzero = 0;
    for (int a = 0; a < m; ++a) {
      if (k[a] != 0) {
        first_nonzero = k[a];
        break;
      }
    }
    if (first_nonzero > 0) {  // canonical representative of {k, -k}
      double lambda = 0.0;
      for (int a = 0; a < m; ++a) lambda += static_cast<double>(k[a]) * k[a];
      basis.modes.push_back({k, lambda, SpectralBasis::kCos});
      basis.modes.push_back({k, lambda, SpectralBasis::kSin});
    }
    int a = m - 1;
    while (a >= 0 && k[a] == kmax) k[a--] = -kmax;
    if (a < 0) break;
    ++k[a];
  }

  basis.values = basis.sample_on(grid);
  basis.gradient.assign(m, Eigen::MatrixXd(grid.total_points(), basis.size()));
  const double volume = grid.volume();
  double x[kMaxDim];
  for (std::size_t p = 0; p < grid.total_points(); ++p) {
    grid.coordinates(p, x);
    for (int i = 0; i < basis.size(); ++i) {
      const SpectralBasis::Mode& mode = basis.modes[i];
      double phase = 0.0;
      for (int a2 = 0; a2 < m; ++a2) phase += mode.k[a2] * x[a2];
      for (int a2 = 0; a2 < m; ++a2) {
        double v = 0.0;
        if (mode.kind == SpectralBasis::kCos)
          v = -std::sqrt(2.0 / volume) * mode.k[a2] * std::sin(phase);
        else if (mode.kind == SpectralBasis::kSin)
          v = std::sqrt(2.0 / volume) * mode.k[a2] * std::cos(phase);
        basis.gradient[a2](static_cast<Eigen::Index>(p), i) = v;
      }
    }
  }
  return basis;
}

Eigen::VectorXd project_initial_data(const SpectralBasis& basis, const GridField& f) {
  if (!(f.grid == basis.grid)) throw std::invalid_argument("project_initial_data: grid mismatch");
  return quadrature_weight(basis.grid) * (basis.values.transpose() * f.samples.matrix());
}

OperatorMatrices operator_matrices(const SpectralBasis& basis, const GridField& a,
                                   const GridField& alpha, const GridField& beta,
                                   const GridField& gamma, const GridField& f) {
  for (const GridField* g : {&a, &alpha, &beta, &gamma, &f})
    if (!(g->grid == basis.grid))
      throw std::invalid_argument("operator_matrices: field grid mismatch");
  const double w = quadrature_weight(basis.grid);
  const Eigen::MatrixXd& W = basis.values;

  Eigen::VectorXd lambda(basis.size());
  for (int i = 0; i < basis.size(); ++i) lambda[i] = basis.modes[i].lambda;

  OperatorMatrices out;
  out.damping = w * (W.transpose() * a.samples.matrix().asDiagonal() * W);
  out.stiffness =
      w * (W.transpose() * alpha.samples.matrix().asDiagonal() * (W * lambda.asDiagonal()));
  const std::vector<GridField> grad_beta = gradient(beta);
  for (int ax = 0; ax < basis.grid.dim(); ++ax)
    out.stiffness.noalias() -=
        w * (W.transpose() * grad_beta[ax].samples.matrix().asDiagonal() * basis.gradient[ax]);
  out.stiffness.noalias() -= w * (W.transpose() * gamma.samples.matrix().asDiagonal() * W);
  out.load = w * (W.transpose() * f.samples.matrix());
  return out;
}

namespace {

void validate_problem(const LinearProblem& p) {
  const auto check_field = [&](const SpaceTimeField& f, const char* what) {
    if (!(f.grid == p.grid)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
    if (f.node_count() != p.damping.node_count() ||
        (f.time_nodes - p.damping.time_nodes).cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument(std::string(what) + ": time nodes differ across coefficients");
    if (!f.values.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite samples");
  };
  if (p.damping.node_count() < 2) throw std::invalid_argument("problem needs at least two time nodes");
  if (std::abs(p.damping.time_nodes[0]) > 1e-14)
    throw std::invalid_argument("time nodes must start at 0");
  for (int j = 1; j < p.damping.node_count(); ++j)
    if (p.damping.time_nodes[j] <= p.damping.time_nodes[j - 1])
      throw std::invalid_argument("time nodes must be ascending");
  check_field(p.damping, "damping");
  check_field(p.stiffness, "stiffness");
  check_field(p.gradient_coupling, "gradient_coupling");
  check_field(p.potential, "potential");
  check_field(p.forcing, "forcing");
  if (!(p.initial_value.grid == p.grid) || !(p.initial_velocity.grid == p.grid))
    throw std::invalid_argument("initial data grid mismatch");
}

SpaceTimeField resample_spacetime(const SpaceTimeField& f, int points) {
  if (points == f.grid.points_per_axis()) return f;
  SpaceTimeField out(TorusGrid(f.grid.dim(), points), f.time_nodes);
  for (int j = 0; j < f.node_count(); ++j) out.set_node(j, resample(f.at_node(j), points));
  return out;
}

// Per-node Galerkin matrices and load vectors.
struct AssembledSystem {
  Eigen::VectorXd nodes;
  std::vector<Eigen::MatrixXd> damping;    // M_B: eta'' = load - M_B eta' - M_A eta
  std::vector<Eigen::MatrixXd> stiffness;  // M_A
  std::vector<Eigen::VectorXd> load;
};

AssembledSystem assemble(const SpectralBasis& basis, const LinearProblem& p) {
  const int nodes = p.damping.node_count();
  AssembledSystem sys;
  sys.nodes = p.damping.time_nodes;
  sys.damping.reserve(nodes);
  sys.stiffness.reserve(nodes);
  sys.load.reserve(nodes);
  for (int j = 0; j < nodes; ++j) {
    OperatorMatrices mats =
        operator_matrices(basis, p.damping.at_node(j), p.stiffness.at_node(j),
                          p.gradient_coupling.at_node(j), p.potential.at_node(j),
                          p.forcing.at_node(j));
    sys.damping.push_back(std::move(mats.damping));
    sys.stiffness.push_back(std::move(mats.stiffness));
    sys.load.push_back(std::move(mats.load));
  }
  return sys;
}

// Linear interpolation of the assembled system at an arbitrary time.
struct InterpolatedSystem {
  Eigen::MatrixXd damping, stiffness;
  Eigen::VectorXd load;

  void at(const AssembledSystem& sys, double t) {
    const int n = static_cast<int>(sys.nodes.size());
    int hi = 1;
    while (hi < n - 1 && sys.nodes[hi] < t) ++hi;
    const double t0 = sys.nodes[hi - 1], t1 = sys.nodes[hi];
    const double s = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
    damping = (1.0 - s) * sys.damping[hi - 1] + s * sys.damping[hi];
    stiffness = (1.0 - s) * sys.stiffness[hi - 1] + s * sys.stiffness[hi];
    load = (1.0 - s) * sys.load[hi - 1] + s * sys.load[hi];
  }
};

}  // namespace

GalerkinSolution integrate_at_cutoff(const LinearProblem& problem, const IntegrateOptions& opts) {
  validate_problem(problem);
  if (opts.dt <= 0.0) throw std::invalid_argument("integrate_at_cutoff: dt must be positive");
  if (opts.record_stride < 1)
    throw std::invalid_argument("integrate_at_cutoff: record_stride must be >= 1");

  // Refine the grid spectrally when the cutoff requires it.
  const int needed = 2 * opts.kmax + 2;
  LinearProblem p = problem;
  if (p.grid.points_per_axis() < needed) {
    const int points = needed;
    p.grid = TorusGrid(p.grid.dim(), points);
    p.damping = resample_spacetime(problem.damping, points);
    p.stiffness = resample_spacetime(problem.stiffness, points);
    p.gradient_coupling = resample_spacetime(problem.gradient_coupling, points);
    p.potential = resample_spacetime(problem.potential, points);
    p.forcing = resample_spacetime(problem.forcing, points);
    p.initial_value = resample(problem.initial_value, points);
    p.initial_velocity = resample(problem.initial_velocity, points);
  }

  const SpectralBasis basis = make_basis(p.grid, opts.kmax);
  const AssembledSystem sys = assemble(basis, p);

  // Stability refusal: the fastest resolved mode oscillates at
  // sqrt(sup alpha * max lambda); demand a comfortable margin under the
  // Runge-Kutta stability boundary.
  const double sup_alpha = p.stiffness.values.cwiseAbs().maxCoeff();
  const double max_lambda = basis.max_lambda();
  if (sup_alpha > 0.0 && max_lambda > 0.0) {
    const double limit = 0.5 / std::sqrt(sup_alpha * max_lambda);
    if (opts.dt > limit)
      throw std::invalid_argument(
          "integrate_at_cutoff: time step exceeds the stability limit of the fastest mode");
  }

  const double t_end = sys.nodes[sys.nodes.size() - 1];
  const auto steps = static_cast<long>(std::ceil(t_end / opts.dt - 1e-9));
  const double h = t_end / static_cast<double>(steps);

  const int modes = basis.size();
  Eigen::VectorXd eta = project_initial_data(basis, p.initial_value);
  Eigen::VectorXd eta_dt = project_initial_data(basis, p.initial_velocity);

  std::vector<double> times;
  std::vector<Eigen::VectorXd> rec, rec_dt;
  const auto record = [&](double t) {
    times.push_back(t);
    rec.push_back(eta);
    rec_dt.push_back(eta_dt);
  };
  record(0.0);

  InterpolatedSystem lo, mid, hi;
  Eigen::VectorXd k1(modes), k2(modes), k3(modes), k4(modes);
  Eigen::VectorXd d1(modes), d2(modes), d3(modes), d4(modes);
  for (long step = 0; step < steps; ++step) {
    const double t = static_cast<double>(step) * h;
    lo.at(sys, t);
    mid.at(sys, t + 0.5 * h);
    hi.at(sys, t + h);

    // k: derivative of eta (just the velocity); d: derivative of eta'.
    k1 = eta_dt;
    d1 = lo.load - lo.damping * eta_dt - lo.stiffness * eta;
    k2 = eta_dt + 0.5 * h * d1;
    d2 = mid.load - mid.damping * k2 - mid.stiffness * (eta + 0.5 * h * k1);
    k3 = eta_dt + 0.5 * h * d2;
    d3 = mid.load - mid.damping * k3 - mid.stiffness * (eta + 0.5 * h * k2);
    k4 = eta_dt + h * d3;
    d4 = hi.load - hi.damping * k4 - hi.stiffness * (eta + h * k3);

    eta += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    eta_dt += (h / 6.0) * (d1 + 2.0 * d2 + 2.0 * d3 + d4);
    if ((step + 1) % opts.record_stride == 0 || step + 1 == steps)
      record(static_cast<double>(step + 1) * h);
  }

  GalerkinSolution sol;
  sol.basis = basis;
  sol.times = std::move(times);
  sol.coeff.resize(modes, static_cast<Eigen::Index>(rec.size()));
  sol.coeff_dt.resize(modes, static_cast<Eigen::Index>(rec.size()));
  for (std::size_t j = 0; j < rec.size(); ++j) {
    sol.coeff.col(static_cast<Eigen::Index>(j)) = rec[j];
    sol.coeff_dt.col(static_cast<Eigen::Index>(j)) = rec_dt[j];
  }
  if (!sol.coeff.allFinite() || !sol.coeff_dt.allFinite())
    throw std::runtime_error("integrate_at_cutoff: integration produced non-finite coefficients");
  return sol;
}

double GalerkinSolution::sobolev_at(int node, int s) const {
  double sum = 0.0;
  for (int i = 0; i < basis.size(); ++i) {
    const double c = coeff(i, node);
    sum += sobolev_weight(basis.modes[i].lambda, s) * c * c;
  }
  return std::sqrt(sum);
}

double GalerkinSolution::sobolev_dt_at(int node, int s) const {
  double sum = 0.0;
  for (int i = 0; i < basis.size(); ++i) {
    const double c = coeff_dt(i, node);
    sum += sobolev_weight(basis.modes[i].lambda, s) * c * c;
  }
  return std::sqrt(sum);
}

double GalerkinSolution::sup_sobolev(int s) const {
  double v = 0.0;
  for (int j = 0; j < node_count(); ++j) v = std::max(v, sobolev_at(j, s));
  return v;
}

double GalerkinSolution::sup_sobolev_dt(int s) const {
  double v = 0.0;
  for (int j = 0; j < node_count(); ++j) v = std::max(v, sobolev_dt_at(j, s));
  return v;
}

SpaceTimeField GalerkinSolution::on_grid(const TorusGrid& g) const {
  Eigen::VectorXd nodes(static_cast<Eigen::Index>(times.size()));
  for (std::size_t j = 0; j < times.size(); ++j) nodes[static_cast<Eigen::Index>(j)] = times[j];
  SpaceTimeField out(g, nodes);
  out.values = basis.sample_on(g) * coeff;
  return out;
}

SpaceTimeField GalerkinSolution::on_grid_dt(const TorusGrid& g) const {
  Eigen::VectorXd nodes(static_cast<Eigen::Index>(times.size()));
  for (std::size_t j = 0; j < times.size(); ++j) nodes[static_cast<Eigen::Index>(j)] = times[j];
  SpaceTimeField out(g, nodes);
  out.values = basis.sample_on(g) * coeff_dt;
  return out;
}

double solution_gap(const GalerkinSolution& a, const GalerkinSolution& b, int s) {
  std::unordered_map<std::int64_t, int> b_index, a_index;
  for (int i = 0; i < b.basis.size(); ++i) b_index.emplace(mode_key(b.basis.modes[i]), i);
  for (int i = 0; i < a.basis.size(); ++i) a_index.emplace(mode_key(a.basis.modes[i]), i);

  // Shared recorded times.
  std::vector<std::pair<int, int>> shared;
  for (std::size_t ja = 0, jb = 0; ja < a.times.size() && jb < b.times.size();) {
    const double ta = a.times[ja], tb = b.times[jb];
    if (std::abs(ta - tb) < 1e-9 * std::max(1.0, std::abs(ta))) {
      shared.emplace_back(static_cast<int>(ja), static_cast<int>(jb));
      ++ja;
      ++jb;
    } else if (ta < tb) {
      ++ja;
    } else {
      ++jb;
    }
  }
  if (shared.size() < 2)
    throw std::invalid_argument("solution_gap: recorded times do not intersect");

  double sup = 0.0;
  for (const auto& [ja, jb] : shared) {
    double sum = 0.0;
    for (int i = 0; i < a.basis.size(); ++i) {
      const auto it = b_index.find(mode_key(a.basis.modes[i]));
      const double cb = it == b_index.end() ? 0.0 : b.coeff(it->second, jb);
      const double d = a.coeff(i, ja) - cb;
      sum += sobolev_weight(a.basis.modes[i].lambda, s) * d * d;
    }
    for (int i = 0; i < b.basis.size(); ++i)
      if (!a_index.count(mode_key(b.basis.modes[i]))) {
        const double d = b.coeff(i, jb);
        sum += sobolev_weight(b.basis.modes[i].lambda, s) * d * d;
      }
    sup = std::max(sup, std::sqrt(sum));
  }
  return sup;
}

GalerkinSolution solve_linear(const LinearProblem& problem, const LinearSolveOptions& opts) {
  IntegrateOptions io;
  io.kmax = opts.kmax;
  io.dt = opts.dt;
  io.record_stride = opts.record_stride;
  GalerkinSolution prev = integrate_at_cutoff(problem, io);
  if (opts.tol <= 0.0) return prev;
  for (int doubling = 1; doubling <= opts.max_doublings; ++doubling) {
    io.kmax *= 2;
    GalerkinSolution cur = integrate_at_cutoff(problem, io);
    if (solution_gap(prev, cur, 1) < opts.tol) return cur;
    prev = std::move(cur);
  }
  throw std::runtime_error("solve_linear: cutoff doubling did not reach the requested tolerance");
}

std::vector<AprioriReport> apriori_report(const GalerkinSolution& sol,
                                          const LinearProblem& problem, int max_order) {
  std::vector<AprioriReport> out;
  const int nodes = problem.forcing.node_count();
  for (int l = 2; l <= max_order; ++l) {
    AprioriReport r;
    r.order = l;
    for (int j = 0; j < sol.node_count(); ++j) {
      const double nu = sol.sobolev_at(j, l);
      const double nv = sol.sobolev_dt_at(j, l - 1);
      r.sup_norm_sq = std::max(r.sup_norm_sq, nu * nu + nv * nv);
    }
    Eigen::VectorXd f_norms(nodes);
    for (int j = 0; j < nodes; ++j) f_norms[j] = sobolev_norm(problem.forcing.at_node(j), l - 1);
    const double bracket = sobolev_norm(problem.initial_value, l) +
                           sobolev_norm(problem.initial_velocity, l - 1) +
                           integrate_time(problem.forcing.time_nodes, f_norms);
    r.data_quantity = bracket * bracket;
    r.ratio = r.sup_norm_sq / std::max(r.data_quantity, 1e-14);
    out.push_back(r);
  }
  return out;
}

}  // namespace curveforge
