#include "critpatch/kinetics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <limits>
#include <string>

#include "critpatch/errors.hpp"

namespace critpatch {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ParameterError(std::string(what) + " must be a positive finite number");
  }
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

GrowthMap::GrowthMap(Family family) : family_(family) {
  std::visit(overloaded{
                 [](const growth::Linear& p) { require_positive(p.b, "linear map b"); },
                 [](const growth::Ricker& p) { require_positive(p.r, "Ricker r"); },
                 [](const growth::BevertonHolt& p) {
                   require_positive(p.lambda, "Beverton-Holt lambda");
                 },
                 [](const growth::Skellam& p) {
                   require_positive(p.R, "Skellam R");
                   require_positive(p.b, "Skellam b");
                 },
             },
             family_);
}

double GrowthMap::operator()(double N) const {
  if (!(N >= 0.0)) throw ParameterError("growth map evaluated at negative density");
  return std::visit(
      overloaded{
          [N](const growth::Linear& p) { return p.b * N; },
          [N](const growth::Ricker& p) { return N * std::exp(p.r * (1.0 - N)); },
          [N](const growth::BevertonHolt& p) {
            return (1.0 + p.lambda) * N / (1.0 + p.lambda * N);
          },
          [N](const growth::Skellam& p) { return -p.R * std::expm1(-p.b * N); },
      },
      family_);
}

double GrowthMap::slope_at_zero() const {
  return std::visit(overloaded{
                        [](const growth::Linear& p) { return p.b; },
                        [](const growth::Ricker& p) { return std::exp(p.r); },
                        [](const growth::BevertonHolt& p) { return 1.0 + p.lambda; },
                        [](const growth::Skellam& p) { return p.R * p.b; },
                    },
                    family_);
}

double GrowthMap::monotone_limit() const {
  if (const auto* p = std::get_if<growth::Ricker>(&family_)) return 1.0 / p->r;
  return kInf;
}

double GrowthMap::witness_coefficient() const {
  return std::visit(
      overloaded{
          [](const growth::Linear&) { return 0.0; },
          // e^{-rN} >= 1 - rN
          [](const growth::Ricker& p) { return p.r * std::exp(p.r); },
          // 1/(1+lambda N) >= 1 - lambda N
          [](const growth::BevertonHolt& p) { return p.lambda * (1.0 + p.lambda); },
          // 1 - e^{-x} >= x - x^2/2
          [](const growth::Skellam& p) { return p.R * p.b * p.b / 2.0; },
      },
      family_);
}

std::string GrowthMap::family_name() const {
  return std::visit(overloaded{
                        [](const growth::Linear&) { return std::string("linear"); },
                        [](const growth::Ricker&) { return std::string("ricker"); },
                        [](const growth::BevertonHolt&) { return std::string("bh"); },
                        [](const growth::Skellam&) { return std::string("skellam"); },
                    },
                    family_);
}

std::vector<double> GrowthMap::parameters() const {
  return std::visit(overloaded{
                        [](const growth::Linear& p) { return std::vector<double>{p.b}; },
                        [](const growth::Ricker& p) { return std::vector<double>{p.r}; },
                        [](const growth::BevertonHolt& p) {
                          return std::vector<double>{p.lambda};
                        },
                        [](const growth::Skellam& p) {
                          return std::vector<double>{p.R, p.b};
                        },
                    },
                    family_);
}

ReactionTerm::ReactionTerm(Family family) : family_(family) {
  std::visit(overloaded{
                 [](const reaction::Logistic& p) { require_positive(p.r, "logistic r"); },
                 [](const reaction::Linear& p) {
                   if (p.b == 0.0 || !std::isfinite(p.b)) {
                     throw ParameterError("linear reaction rate must be finite and nonzero");
                   }
                 },
                 [](const reaction::QuadraticGrowth& p) {
                   if (p.alpha == 0.0 || !std::isfinite(p.alpha)) {
                     throw ParameterError("quadratic reaction alpha must be finite and nonzero");
                   }
                   require_positive(p.beta, "quadratic reaction beta");
                 },
             },
             family_);
}

double ReactionTerm::operator()(double u) const {
  return std::visit(
      overloaded{
          [u](const reaction::Logistic& p) { return p.r * u * (1.0 - u); },
          [u](const reaction::Linear& p) { return p.b * u; },
          [u](const reaction::QuadraticGrowth& p) { return p.alpha * u - p.beta * u * u; },
      },
      family_);
}

double ReactionTerm::slope_at_zero() const {
  return std::visit(overloaded{
                        [](const reaction::Logistic& p) { return p.r; },
                        [](const reaction::Linear& p) { return p.b; },
                        [](const reaction::QuadraticGrowth& p) { return p.alpha; },
                    },
                    family_);
}

double ReactionTerm::witness_coefficient() const {
  return std::visit(overloaded{
                        [](const reaction::Logistic& p) { return p.r; },
                        [](const reaction::Linear&) { return 0.0; },
                        [](const reaction::QuadraticGrowth& p) { return p.beta; },
                    },
                    family_);
}

std::string ReactionTerm::family_name() const {
  return std::visit(overloaded{
                        [](const reaction::Logistic&) { return std::string("logistic"); },
                        [](const reaction::Linear&) { return std::string("linear"); },
                        [](const reaction::QuadraticGrowth&) {
                          return std::string("quadratic");
                        },
                    },
                    family_);
}

std::vector<double> ReactionTerm::parameters() const {
  return std::visit(overloaded{
                        [](const reaction::Logistic& p) { return std::vector<double>{p.r}; },
                        [](const reaction::Linear& p) { return std::vector<double>{p.b}; },
                        [](const reaction::QuadraticGrowth& p) {
                          return std::vector<double>{p.alpha, p.beta};
                        },
                    },
                    family_);
}

double eval_growth(const GrowthMap& g, double N) { return g(N); }

double gprime_at_zero(const GrowthMap& g) { return g.slope_at_zero(); }

Viability check_viability(const ReactionTerm& f, const GrowthMap& g) {
  const double margin = f.slope_at_zero() + std::log(g.slope_at_zero());
  return {margin > 0.0, margin};
}

double equilibrium_defect(const ReactionTerm& f, const GrowthMap& g, double N) {
  if (!(N > 0.0)) throw ParameterError("equilibrium defect needs N > 0");
  const double lo_end = g(N);
  const double hi_end = N;
  if (lo_end == hi_end) return -1.0;
  const double a = std::min(lo_end, hi_end);
  const double b = std::max(lo_end, hi_end);

  // f must keep one sign on [a, b]; sample densely and reject near-zeros.
  constexpr int kSamples = 256;
  const double f_a = f(a);
  for (int i = 0; i <= kSamples; ++i) {
    const double w = a + (b - a) * i / kSamples;
    const double fw = f(w);
    if (std::abs(fw) < 1e-14 || (fw > 0.0) != (f_a > 0.0)) {
      throw SingularIntegrandError("reaction term vanishes between g(N) and N");
    }
  }

  using boost::math::quadrature::gauss_kronrod;
  // Integrate over [0, 1]: the adaptive error test is not scale-invariant,
  // so short intervals near zero would otherwise recurse to full depth.
  const double width = b - a;
  const auto integrand = [&f, a, width](double t) { return 1.0 / f(a + width * t); };
  double err = 0.0;
  const double integral =
      width * gauss_kronrod<double, 15>::integrate(integrand, 0.0, 1.0, 20, 1e-13, &err);
  const double oriented = (lo_end <= hi_end) ? integral : -integral;
  return oriented - 1.0;
}

std::optional<double> solve_equilibrium(const ReactionTerm& f, const GrowthMap& g,
                                        const EquilibriumOptions& options) {
  const double n_max =
      options.n_max.value_or(10.0 * std::max(1.0, 1.0 / g.slope_at_zero()));
  if (!(n_max > 0.0)) throw ParameterError("equilibrium window must be positive");
  const int points = std::max(options.scan_points, 16);

  // Log-spaced scan from 1e-9 n_max up to n_max.
  const double lo = n_max * 1e-9;
  const double ratio = std::pow(n_max / lo, 1.0 / (points - 1));

  auto defect = [&](double N) -> std::optional<double> {
    try {
      return equilibrium_defect(f, g, N);
    } catch (const SingularIntegrandError&) {
      return std::nullopt;
    }
  };

  // Root search on a bracket [a, b] with regular endpoints of opposite sign.
  // A sign flip can also come from a pole between two regular samples; the
  // residual check filters those out.
  auto refine = [&](double a, double fa, double b, double fb) -> std::optional<double> {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa < 0.0) == (fb < 0.0)) return std::nullopt;
    bool singular = false;
    auto fn = [&](double x) {
      const auto v = defect(x);
      if (!v) {
        singular = true;
        return 0.0;
      }
      return *v;
    };
    boost::uintmax_t max_iter = 200;
    const auto tol = boost::math::tools::eps_tolerance<double>(50);
    const auto [ra, rb] = boost::math::tools::toms748_solve(fn, a, b, fa, fb, tol, max_iter);
    const double root = 0.5 * (ra + rb);
    const auto residual = defect(root);
    if (!singular && residual && std::abs(*residual) <= 1e-10) return root;
    return std::nullopt;
  };

  // Edge of the regular region between a regular and a singular sample.
  // The defect typically diverges there, so the edge can close a bracket.
  auto regular_edge = [&](double regular, double singular) {
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (regular + singular);
      if (defect(mid)) {
        regular = mid;
      } else {
        singular = mid;
      }
    }
    return regular;
  };

  double prev_n = lo;
  std::optional<double> prev_f = defect(prev_n);
  for (int i = 1; i < points; ++i) {
    const double n = (i == points - 1) ? n_max : lo * std::pow(ratio, i);
    const std::optional<double> cur_f = defect(n);
    std::optional<double> root;
    if (prev_f && cur_f) {
      root = refine(prev_n, *prev_f, n, *cur_f);
    } else if (prev_f) {
      const double edge = regular_edge(prev_n, n);
      if (edge > prev_n) root = refine(prev_n, *prev_f, edge, *defect(edge));
    } else if (cur_f) {
      const double edge = regular_edge(n, prev_n);
      if (edge < n) root = refine(edge, *defect(edge), n, *cur_f);
    }
    if (root) return root;
    prev_n = n;
    prev_f = cur_f;
  }
  return std::nullopt;
}

std::vector<double> iterate_nonspatial(const ReactionTerm& f, const GrowthMap& g,
                                       double N0, int cycles) {
  if (!(N0 >= 0.0)) throw ParameterError("initial density must be nonnegative");
  if (cycles < 0) throw ParameterError("cycle count must be nonnegative");
  constexpr int kSteps = 1000;
  constexpr double kDt = 1.0 / kSteps;

  std::vector<double> trajectory;
  trajectory.reserve(static_cast<std::size_t>(cycles) + 1);
  trajectory.push_back(N0);
  double N = N0;
  for (int m = 0; m < cycles; ++m) {
    double u = g(N);
    for (int s = 0; s < kSteps; ++s) {
      const double k1 = f(u);
      const double k2 = f(u + 0.5 * kDt * k1);
      const double k3 = f(u + 0.5 * kDt * k2);
      const double k4 = f(u + kDt * k3);
      u += kDt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!std::isfinite(u) || std::abs(u) > 1e12) {
        throw DivergenceError("nonspatial recurrence diverged in cycle " +
                              std::to_string(m + 1));
      }
    }
    // Densities stay nonnegative; round-off below zero is clamped.
    N = std::max(u, 0.0);
    trajectory.push_back(N);
  }
  return trajectory;
}

}  // namespace critpatch
