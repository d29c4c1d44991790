#pragma once

// Between-season growth maps g and within-season reaction terms f, plus the
// nonspatial (well-mixed) recurrence they generate.

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace critpatch {

namespace growth {
struct Linear {
  double b;
};
struct Ricker {
  double r;
};
struct BevertonHolt {
  double lambda;
};
struct Skellam {
  double R;
  double b;
};
}  // namespace growth

/// Between-season map N -> g(N). Parameters are validated on construction,
/// so every instance satisfies g(0) = 0 < g'(0).
class GrowthMap {
 public:
  using Family = std::variant<growth::Linear, growth::Ricker,
                              growth::BevertonHolt, growth::Skellam>;

  explicit GrowthMap(Family family);

  static GrowthMap linear(double b) { return GrowthMap(growth::Linear{b}); }
  static GrowthMap ricker(double r) { return GrowthMap(growth::Ricker{r}); }
  static GrowthMap beverton_holt(double lambda) {
    return GrowthMap(growth::BevertonHolt{lambda});
  }
  static GrowthMap skellam(double R, double b) {
    return GrowthMap(growth::Skellam{R, b});
  }

  /// g(N). Throws ParameterError for N < 0.
  double operator()(double N) const;

  double slope_at_zero() const;

  /// Upper end M of the interval [0, M] on which g is nondecreasing.
  /// Infinite except for Ricker (1/r).
  double monotone_limit() const;

  /// Coefficient c of the quadratic witness h(N) = c N^2 with
  /// g(N) >= g'(0) N - h(N) for all N >= 0.
  double witness_coefficient() const;
  double witness(double N) const { return witness_coefficient() * N * N; }

  const Family& family() const { return family_; }
  std::string family_name() const;
  std::vector<double> parameters() const;

 private:
  Family family_;
};

namespace reaction {
/// f(u) = r u (1 - u), r > 0
struct Logistic {
  double r;
};
/// f(u) = b u, b != 0 (any sign)
struct Linear {
  double b;
};
/// f(u) = alpha u - beta u^2, alpha != 0, beta > 0
struct QuadraticGrowth {
  double alpha;
  double beta;
};
}  // namespace reaction

/// Within-season kinetics u' = f(u). Every instance has f(0) = 0 and
/// f'(0) != 0.
class ReactionTerm {
 public:
  using Family = std::variant<reaction::Logistic, reaction::Linear,
                              reaction::QuadraticGrowth>;

  explicit ReactionTerm(Family family);

  static ReactionTerm logistic(double r) {
    return ReactionTerm(reaction::Logistic{r});
  }
  static ReactionTerm linear(double b) {
    return ReactionTerm(reaction::Linear{b});
  }
  static ReactionTerm quadratic(double alpha, double beta) {
    return ReactionTerm(reaction::QuadraticGrowth{alpha, beta});
  }

  double operator()(double u) const;
  double slope_at_zero() const;

  /// Coefficient of h(N) = c N^2 with f'(0) N - h(N) <= f(N) <= f'(0) N.
  double witness_coefficient() const;
  double witness(double N) const { return witness_coefficient() * N * N; }

  bool is_linear() const {
    return std::holds_alternative<reaction::Linear>(family_);
  }

  const Family& family() const { return family_; }
  std::string family_name() const;
  std::vector<double> parameters() const;

 private:
  Family family_;
};

double eval_growth(const GrowthMap& g, double N);
double gprime_at_zero(const GrowthMap& g);

struct Viability {
  bool viable;
  /// f'(0) + ln g'(0); positive iff e^{f'(0)} g'(0) > 1.
  double margin;
};

Viability check_viability(const ReactionTerm& f, const GrowthMap& g);

/// F(N) = integral_{g(N)}^{N} dw / f(w) - 1, the defect of the equilibrium
/// condition. Throws SingularIntegrandError when f vanishes on the closed
/// interval between g(N) and N.
double equilibrium_defect(const ReactionTerm& f, const GrowthMap& g, double N);

struct EquilibriumOptions {
  /// Upper end of the search window; defaults to 10 max(1, 1/g'(0)).
  std::optional<double> n_max;
  int scan_points = 600;
};

/// Smallest positive N* with equilibrium_defect(N*) = 0 in (0, n_max], or
/// nullopt if no bracket is found.
std::optional<double> solve_equilibrium(const ReactionTerm& f,
                                        const GrowthMap& g,
                                        const EquilibriumOptions& options = {});

/// Well-mixed recurrence: each cycle integrates u' = f(u) over one season
/// from u(0) = g(N_m) with classical RK4 at step 1e-3. Returns N_0..N_cycles.
/// Throws DivergenceError when |u| exceeds 1e12.
std::vector<double> iterate_nonspatial(const ReactionTerm& f,
                                       const GrowthMap& g, double N0,
                                       int cycles);

}  // namespace critpatch
