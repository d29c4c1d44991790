#pragma once

// Hybrid season dynamics: N_{m+1} = Q[g(N_m)], where Q integrates
// u_t = d Lap u - a . grad u + f(u) with u = 0 on the boundary over one
// season (t in [0, 1]).

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "critpatch/geometry.hpp"
#include "critpatch/kinetics.hpp"
#include "critpatch/spectral.hpp"
#include "critpatch/thresholds.hpp"

namespace critpatch {

/// Density on the interior unknowns of `grid`; Dirichlet nodes are
/// implicitly zero.
struct FieldState {
  std::shared_ptr<const Grid> grid;
  std::vector<double> values;
  int season = 0;

  double sup() const;
  /// Sum of values times the cell measure.
  double mass() const;
};

FieldState zero_state(std::shared_ptr<const Grid> grid);

struct PropagatorOptions {
  double dt = 1e-3;
};

/// Season propagator Q for fixed (grid, d, a, f, dt). Diffusion and
/// advection are treated with Crank-Nicolson, the reaction explicitly:
///   (I + dt/2 K) u^{k+1} = (I - dt/2 K) u^k + dt f(u^k).
/// The implicit matrix is factored once on construction; instances are
/// immutable and safe to share between threads.
class SeasonPropagator {
 public:
  SeasonPropagator(std::shared_ptr<const Grid> grid, double d, std::vector<double> drift,
                   ReactionTerm f, PropagatorOptions options = {});

  /// u(., 1) from u(., 0) = u0. Throws NumericError on NaN, blow-up or an
  /// undershoot below -1e-8; smaller negative values are clamped to 0.
  FieldState propagate(const FieldState& u0) const;

  /// One full cycle: Q applied to the node-wise image g(N_m).
  FieldState impulse_cycle(const FieldState& state, const GrowthMap& g) const;

  const std::shared_ptr<const Grid>& grid() const;
  double diffusivity() const;
  std::span<const double> drift() const;
  const ReactionTerm& reaction() const;
  bool upwind() const;
  int steps_per_season() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// Convenience wrapper building a propagator for one call.
FieldState propagate_Q(const FieldState& u0, double d, std::span<const double> drift,
                       const ReactionTerm& f, PropagatorOptions options = {});

struct ClassifierTolerances {
  double extinction = 1e-8;
  double persistence_floor = 1e-4;
  double stationarity = 1e-5;
  int window = 10;
  int max_cycles = 200;
};

struct Classification {
  Verdict verdict = Verdict::Inconclusive;
  /// Mass ratio of the last two cycles.
  double growth_factor = 0.0;
  double lambda1 = 0.0;
  /// f'(0) + ln g'(0) - lambda1
  double threshold_margin = 0.0;
  int cycles = 0;
  double final_sup = 0.0;
  /// Minimum over the probe region at termination.
  double probe_min = 0.0;
  ClassifierTolerances tolerances;
  /// sup N_m for m = 0..cycles
  std::vector<double> sup_history;
  std::vector<double> mass_history;
};

/// Probe region for the persistence test: interior nodes whose lattice
/// distance to the nearest Dirichlet node is at least half the largest
/// such distance. Returned as unknown indices.
std::vector<std::size_t> probe_region(const Grid& grid);

/// Runs impulse cycles until
///   Extinction:  sup N_m < tolerances.extinction, or
///   Persistence: for `window` consecutive cycles the probe minimum stays
///                >= persistence_floor and the relative sup-norm change
///                stays < stationarity,
/// or max_cycles is reached (Inconclusive). `lambda1` is attached to the
/// result along with the margin f'(0) + ln g'(0) - lambda1.
Classification iterate_and_classify(const FieldState& initial, const GrowthMap& g,
                                    const SeasonPropagator& propagator, double lambda1,
                                    const ClassifierTolerances& tolerances = {});

/// Same, building the propagator from (d, a, f) and taking lambda1 from a
/// numeric eigen-solve on the state's grid.
Classification iterate_and_classify(const FieldState& initial, const GrowthMap& g, double d,
                                    std::span<const double> drift, const ReactionTerm& f,
                                    const ClassifierTolerances& tolerances = {},
                                    PropagatorOptions options = {});

/// Principal eigenfunction scaled to max `amplitude`.
FieldState eigenmode_state(std::shared_ptr<const Grid> grid, const SpectralResult& eigen,
                           double amplitude = 0.1);

/// Smooth centred bump (product of sines over the grid's bounding box on
/// interior nodes) with max `amplitude`.
FieldState bump_state(std::shared_ptr<const Grid> grid, double amplitude = 0.1);

enum class LambdaSource { ClosedForm, Numeric };

/// rho = g'(0) e^{f'(0) - lambda1}. Numeric mode rasterizes `domain` at
/// spacing h.
double linearized_growth_factor(double d, std::span<const double> drift, const Domain& domain,
                                const ReactionTerm& f, const GrowthMap& g, LambdaSource method,
                                double h = 0.0);

}  // namespace critpatch
