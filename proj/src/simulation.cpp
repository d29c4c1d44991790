#include "critpatch/simulation.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <sstream>

#include "critpatch/errors.hpp"
#include "transport.hpp"

namespace critpatch {

namespace {

constexpr double kClampFloor = -1e-8;
constexpr double kBlowUp = 1e12;

void require_state(const FieldState& s) {
  if (!s.grid) throw ParameterError("field state has no grid");
  if (s.values.size() != s.grid->interior_count()) {
    throw ParameterError("field state size does not match its grid");
  }
}

}  // namespace

double FieldState::sup() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, v);
  return m;
}

double FieldState::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return grid ? s * grid->cell_measure() : s;
}

FieldState zero_state(std::shared_ptr<const Grid> grid) {
  if (!grid) throw ParameterError("null grid");
  FieldState s;
  s.values.assign(grid->interior_count(), 0.0);
  s.grid = std::move(grid);
  return s;
}

struct SeasonPropagator::Impl {
  std::shared_ptr<const Grid> grid;
  double d;
  std::vector<double> drift;
  ReactionTerm f;
  int steps;
  double dt;
  bool upwind;
  Eigen::SparseMatrix<double> explicit_part;  // I - dt/2 K
  Eigen::SparseLU<Eigen::SparseMatrix<double>> implicit_part;  // I + dt/2 K

  Impl(std::shared_ptr<const Grid> g, double diff, std::vector<double> a, ReactionTerm rt,
       PropagatorOptions options)
      : grid(std::move(g)), d(diff), drift(std::move(a)), f(std::move(rt)) {
    if (!grid) throw ParameterError("null grid");
    if (!(options.dt > 0.0) || options.dt > 1.0) {
      throw ParameterError("time step must lie in (0, 1]");
    }
    steps = static_cast<int>(std::lround(1.0 / options.dt));
    dt = 1.0 / steps;
    const double fp = std::abs(f.slope_at_zero());
    if (dt > 0.1 / fp * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "time step " << dt << " exceeds 0.1/|f'(0)| = " << 0.1 / fp;
      throw ParameterError(msg.str());
    }

    const auto op = detail::assemble_transport(*grid, d, drift);
    upwind = op.upwind;
    const auto n = op.matrix.rows();
    Eigen::SparseMatrix<double> identity(n, n);
    identity.setIdentity();
    explicit_part = identity - (0.5 * dt) * op.matrix;
    Eigen::SparseMatrix<double> lhs = identity + (0.5 * dt) * op.matrix;
    lhs.makeCompressed();
    implicit_part.analyzePattern(lhs);
    implicit_part.factorize(lhs);
    if (implicit_part.info() != Eigen::Success) {
      throw NumericError("failed to factor the season propagator");
    }
  }
};

SeasonPropagator::SeasonPropagator(std::shared_ptr<const Grid> grid, double d,
                                   std::vector<double> drift, ReactionTerm f,
                                   PropagatorOptions options)
    : impl_(std::make_shared<const Impl>(std::move(grid), d, std::move(drift), std::move(f),
                                         options)) {}

const std::shared_ptr<const Grid>& SeasonPropagator::grid() const { return impl_->grid; }
double SeasonPropagator::diffusivity() const { return impl_->d; }
std::span<const double> SeasonPropagator::drift() const { return impl_->drift; }
const ReactionTerm& SeasonPropagator::reaction() const { return impl_->f; }
bool SeasonPropagator::upwind() const { return impl_->upwind; }
int SeasonPropagator::steps_per_season() const { return impl_->steps; }

FieldState SeasonPropagator::propagate(const FieldState& u0) const {
  require_state(u0);
  if (u0.grid != impl_->grid && u0.grid->interior_count() != impl_->grid->interior_count()) {
    throw ParameterError("field state lives on a different grid");
  }
  const auto n = static_cast<Eigen::Index>(u0.values.size());
  Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(u0.values.data(), n);
  Eigen::VectorXd rhs(n);
  const auto& f = impl_->f;
  const double dt = impl_->dt;

  for (int k = 0; k < impl_->steps; ++k) {
    rhs.noalias() = impl_->explicit_part * u;
    for (Eigen::Index i = 0; i < n; ++i) rhs[i] += dt * f(u[i]);
    u = impl_->implicit_part.solve(rhs);
    for (Eigen::Index i = 0; i < n; ++i) {
      double& v = u[i];
      if (!std::isfinite(v) || std::abs(v) > kBlowUp) {
        std::ostringstream msg;
        msg << "season propagation diverged at step " << k + 1;
        throw DivergenceError(msg.str());
      }
      if (v < 0.0) {
        if (v < kClampFloor) {
          std::ostringstream msg;
          msg << "negative density " << v << " at step " << k + 1
              << " (scheme unstable for this resolution)";
          throw NumericError(msg.str());
        }
        v = 0.0;
      }
    }
  }

  FieldState out;
  out.grid = u0.grid;
  out.season = u0.season;
  out.values.assign(u.data(), u.data() + n);
  return out;
}

FieldState SeasonPropagator::impulse_cycle(const FieldState& state, const GrowthMap& g) const {
  require_state(state);
  FieldState start = state;
  for (double& v : start.values) v = g(v);
  FieldState next = propagate(start);
  next.season = state.season + 1;
  return next;
}

FieldState propagate_Q(const FieldState& u0, double d, std::span<const double> drift,
                       const ReactionTerm& f, PropagatorOptions options) {
  require_state(u0);
  SeasonPropagator q(u0.grid, d, std::vector<double>(drift.begin(), drift.end()), f, options);
  return q.propagate(u0);
}

std::vector<std::size_t> probe_region(const Grid& grid) {
  const std::size_t total = grid.lattice_size();
  constexpr int kUnset = std::numeric_limits<int>::max();
  std::vector<int> dist(total, kUnset);
  std::deque<std::size_t> queue;
  for (std::size_t node = 0; node < total; ++node) {
    if (grid.unknown(node) < 0) {
      dist[node] = 0;
      queue.push_back(node);
    }
  }
  while (!queue.empty()) {
    const std::size_t node = queue.front();
    queue.pop_front();
    for (int ax = 0; ax < grid.dimension(); ++ax) {
      for (int dir : {-1, 1}) {
        const std::ptrdiff_t nb = grid.neighbour(node, ax, dir);
        if (nb < 0) continue;
        const auto nbu = static_cast<std::size_t>(nb);
        if (dist[nbu] == kUnset) {
          dist[nbu] = dist[node] + 1;
          queue.push_back(nbu);
        }
      }
    }
  }
  int deepest = 0;
  for (std::size_t u = 0; u < grid.interior_count(); ++u) {
    deepest = std::max(deepest, dist[grid.node(u)]);
  }
  std::vector<std::size_t> probe;
  for (std::size_t u = 0; u < grid.interior_count(); ++u) {
    if (2 * dist[grid.node(u)] >= deepest) probe.push_back(u);
  }
  return probe;
}

Classification iterate_and_classify(const FieldState& initial, const GrowthMap& g,
                                    const SeasonPropagator& propagator, double lambda1,
                                    const ClassifierTolerances& tol) {
  require_state(initial);
  if (tol.max_cycles < 1 || tol.window < 1 || !(tol.extinction > 0.0) ||
      !(tol.persistence_floor > 0.0) || !(tol.stationarity > 0.0)) {
    throw ParameterError("classifier tolerances must be positive");
  }
  for (double v : initial.values) {
    if (!(v >= 0.0)) throw ParameterError("initial density must be nonnegative");
  }

  Classification out;
  out.tolerances = tol;
  out.lambda1 = lambda1;
  out.threshold_margin =
      check_viability(propagator.reaction(), g).margin - lambda1;

  const auto probe = probe_region(*initial.grid);
  auto probe_min = [&probe](const FieldState& s) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t u : probe) m = std::min(m, s.values[u]);
    return probe.empty() ? 0.0 : m;
  };

  FieldState state = initial;
  out.sup_history.push_back(state.sup());
  out.mass_history.push_back(state.mass());
  out.final_sup = state.sup();
  out.probe_min = probe_min(state);

  int steady = 0;
  for (int m = 1; m <= tol.max_cycles; ++m) {
    state = propagator.impulse_cycle(state, g);
    const double sup = state.sup();
    const double mass = state.mass();
    const double prev_sup = out.sup_history.back();
    const double prev_mass = out.mass_history.back();
    out.sup_history.push_back(sup);
    out.mass_history.push_back(mass);
    out.cycles = m;
    out.final_sup = sup;
    out.probe_min = probe_min(state);
    if (prev_mass > 0.0 && mass > 0.0) out.growth_factor = mass / prev_mass;

    if (sup < tol.extinction) {
      out.verdict = Verdict::Extinction;
      return out;
    }
    const double change = std::abs(sup - prev_sup) / sup;
    if (out.probe_min >= tol.persistence_floor && change < tol.stationarity) {
      if (++steady >= tol.window) {
        out.verdict = Verdict::Persistence;
        return out;
      }
    } else {
      steady = 0;
    }
  }
  out.verdict = Verdict::Inconclusive;
  return out;
}

Classification iterate_and_classify(const FieldState& initial, const GrowthMap& g, double d,
                                    std::span<const double> drift, const ReactionTerm& f,
                                    const ClassifierTolerances& tolerances,
                                    PropagatorOptions options) {
  require_state(initial);
  const SpectralResult eigen = lambda1_numeric(*initial.grid, d, drift);
  SeasonPropagator q(initial.grid, d, std::vector<double>(drift.begin(), drift.end()), f,
                     options);
  return iterate_and_classify(initial, g, q, eigen.lambda1, tolerances);
}

FieldState eigenmode_state(std::shared_ptr<const Grid> grid, const SpectralResult& eigen,
                           double amplitude) {
  if (!grid) throw ParameterError("null grid");
  if (eigen.eigenfunction.size() != grid->interior_count()) {
    throw ParameterError("eigenfunction does not match the grid");
  }
  if (!(amplitude >= 0.0)) throw ParameterError("amplitude must be nonnegative");
  FieldState s;
  s.grid = std::move(grid);
  s.values = eigen.eigenfunction;
  double peak = 0.0;
  for (double v : s.values) peak = std::max(peak, v);
  if (!(peak > 0.0)) throw ParameterError("eigenfunction is identically zero");
  for (double& v : s.values) v *= amplitude / peak;
  return s;
}

FieldState bump_state(std::shared_ptr<const Grid> grid, double amplitude) {
  if (!grid) throw ParameterError("null grid");
  if (!(amplitude >= 0.0)) throw ParameterError("amplitude must be nonnegative");
  FieldState s = zero_state(grid);
  const int n = grid->dimension();
  std::array<double, 3> lo{};
  std::array<double, 3> hi{};
  const auto first = grid->coordinates(0);
  const auto last = grid->coordinates(grid->lattice_size() - 1);
  for (int a = 0; a < n; ++a) {
    lo[a] = first[a];
    hi[a] = last[a];
  }
  double peak = 0.0;
  for (std::size_t u = 0; u < grid->interior_count(); ++u) {
    const auto x = grid->coordinates(grid->node(u));
    double v = 1.0;
    for (int a = 0; a < n; ++a) v *= std::sin(std::numbers::pi * (x[a] - lo[a]) / (hi[a] - lo[a]));
    s.values[u] = std::max(v, 0.0);
    peak = std::max(peak, s.values[u]);
  }
  if (peak > 0.0) {
    for (double& v : s.values) v *= amplitude / peak;
  }
  return s;
}

double linearized_growth_factor(double d, std::span<const double> drift, const Domain& domain,
                                const ReactionTerm& f, const GrowthMap& g, LambdaSource method,
                                double h) {
  double lambda1 = 0.0;
  if (method == LambdaSource::ClosedForm) {
    lambda1 = lambda1_closed(d, drift, domain).lambda1;
  } else {
    lambda1 = lambda1_numeric(rasterize(domain, h), d, drift).lambda1;
  }
  return g.slope_at_zero() * std::exp(f.slope_at_zero() - lambda1);
}

}  // namespace critpatch
