#include "critpatch/thresholds.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "critpatch/errors.hpp"
#include "critpatch/spectral.hpp"

namespace critpatch {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double norm2(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

void require_d(double d) {
  if (!(d > 0.0) || !std::isfinite(d)) throw ParameterError("diffusivity must be positive");
}

void require_n(int n) {
  if (n < 1) throw ParameterError("dimension must be at least 1");
}

ThresholdInputs echo(double d, double drift2, const ReactionTerm& f, const GrowthMap& g, int n,
                     std::string method) {
  return {d, std::sqrt(drift2), f.slope_at_zero(), g.slope_at_zero(), n, std::move(method)};
}

ThresholdReport make(std::string name, QuantityKind kind, double value, ThresholdInputs in) {
  ThresholdReport r;
  r.name = std::move(name);
  r.kind = kind;
  r.value = value;
  r.inputs = std::move(in);
  return r;
}

ThresholdReport unbounded(std::string name, QuantityKind kind, ThresholdInputs in) {
  auto r = make(std::move(name), kind, kInf, std::move(in));
  r.regime = kRegimeUnbounded;
  return r;
}

// Core formulas in terms of the viability margin m = f'(0) + ln g'(0).

double hypercube_side(double d, double drift2, double margin, int n) {
  const double denom = 4.0 * d * margin - drift2;
  if (!(denom > 0.0)) return kInf;
  return 2.0 * kPi * d * std::sqrt(n / denom);
}

double ball_radius(double d, double margin, int n) {
  if (!(margin > 0.0)) return kInf;
  return ball_bessel_zero(n) * std::sqrt(d / margin);
}

double volume_rfk(double d, double margin, int n) {
  const double j = ball_bessel_zero(n);
  return std::pow(d * kPi * j * j / margin, n / 2.0) / std::tgamma(1.0 + n / 2.0);
}

double volume_liyau(double d, double margin, int n) {
  return std::tgamma(1.0 + n / 2.0) * std::pow(4.0 * d * n * kPi / ((n + 2.0) * margin), n / 2.0);
}

double volume_rect(double d, double drift2, double margin, int n) {
  const double denom = 4.0 * d * margin - drift2;
  if (!(denom > 0.0)) return kInf;
  return std::pow(4.0 * d * d * kPi * kPi * n / denom, n / 2.0);
}

double inverse_square_sum(const std::vector<double>& lengths) {
  double s = 0.0;
  for (double L : lengths) s += 1.0 / (L * L);
  return s;
}

void require_two_lengths(const PresetParams& p) {
  if (p.lengths.size() != 2) throw ParameterError("preset needs two side lengths L1, L2");
  for (double L : p.lengths) {
    if (!(L > 0.0)) throw ParameterError("side lengths must be positive");
  }
}

}  // namespace

std::string to_string(QuantityKind k) {
  switch (k) {
    case QuantityKind::CriticalLength: return "critical_length";
    case QuantityKind::CriticalRadius: return "critical_radius";
    case QuantityKind::LengthConstraint: return "length_constraint";
    case QuantityKind::ExtremeVolume: return "extreme_volume";
    case QuantityKind::Speed: return "speed";
    case QuantityKind::PresetParameter: return "preset_parameter";
  }
  return "unknown";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Extinction: return "Extinction";
    case Verdict::Persistence: return "Persistence";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "unknown";
}

std::string to_string(VolumeMethod m) {
  switch (m) {
    case VolumeMethod::RFK: return "rfk";
    case VolumeMethod::Rect: return "rect";
    case VolumeMethod::LiYau: return "liyau";
  }
  return "unknown";
}

std::string to_string(Preset p) {
  switch (p) {
    case Preset::MarineReserve: return "marine";
    case Preset::TerrestrialReserve: return "terrestrial";
    case Preset::InsectPest: return "pest";
    case Preset::ClimateChange: return "climate";
  }
  return "unknown";
}

Preset preset_from_string(const std::string& name) {
  if (name == "marine") return Preset::MarineReserve;
  if (name == "terrestrial") return Preset::TerrestrialReserve;
  if (name == "pest" || name == "insect") return Preset::InsectPest;
  if (name == "climate") return Preset::ClimateChange;
  throw ParameterError("unknown preset '" + name +
                       "' (expected marine, terrestrial, pest or climate)");
}

Verdict predict_from_growth_factor(double rho) {
  if (rho < 1.0) return Verdict::Extinction;
  if (rho > 1.0) return Verdict::Persistence;
  return Verdict::Inconclusive;
}

Verdict predict_from_volume(double domain_volume, double extreme_volume) {
  return domain_volume < extreme_volume ? Verdict::Extinction : Verdict::Inconclusive;
}

ThresholdReport critical_rect_constraint(double d, std::span<const double> drift,
                                         const ReactionTerm& f, const GrowthMap& g) {
  require_d(d);
  const double drift2 = norm2(drift);
  const int n = static_cast<int>(drift.size());
  auto in = echo(d, drift2, f, g, n, "rect");
  const double bracket = check_viability(f, g).margin - drift2 / (4.0 * d);
  if (!(bracket > 0.0)) {
    return unbounded("sum_inverse_square_lengths", QuantityKind::LengthConstraint, std::move(in));
  }
  return make("sum_inverse_square_lengths", QuantityKind::LengthConstraint,
              bracket / (d * kPi * kPi), std::move(in));
}

ThresholdReport critical_hypercube_L(double d, std::span<const double> drift,
                                     const ReactionTerm& f, const GrowthMap& g, int n) {
  require_d(d);
  require_n(n);
  const double drift2 = norm2(drift);
  auto in = echo(d, drift2, f, g, n, "rect");
  const double L = hypercube_side(d, drift2, check_viability(f, g).margin, n);
  if (std::isinf(L)) return unbounded("L_star", QuantityKind::CriticalLength, std::move(in));
  return make("L_star", QuantityKind::CriticalLength, L, std::move(in));
}

ThresholdReport critical_radius_ball(double d, const ReactionTerm& f, const GrowthMap& g,
                                     int n) {
  require_d(d);
  require_n(n);
  auto in = echo(d, 0.0, f, g, n, "ball");
  const double R = ball_radius(d, check_viability(f, g).margin, n);
  if (std::isinf(R)) return unbounded("R_star", QuantityKind::CriticalRadius, std::move(in));
  return make("R_star", QuantityKind::CriticalRadius, R, std::move(in));
}

ThresholdReport extreme_volume(VolumeMethod method, double d, std::span<const double> drift,
                               const ReactionTerm& f, const GrowthMap& g, int n) {
  require_d(d);
  require_n(n);
  const double margin = check_viability(f, g).margin;
  const double drift2 = method == VolumeMethod::Rect ? norm2(drift) : 0.0;
  auto in = echo(d, norm2(drift), f, g, n, to_string(method));
  const std::string name = "V_ex_" + to_string(method);
  switch (method) {
    case VolumeMethod::Rect: {
      const double v = volume_rect(d, drift2, margin, n);
      if (std::isinf(v)) return unbounded(name, QuantityKind::ExtremeVolume, std::move(in));
      return make(name, QuantityKind::ExtremeVolume, v, std::move(in));
    }
    case VolumeMethod::RFK:
    case VolumeMethod::LiYau: {
      if (!(margin > 0.0)) {
        throw ParameterError("extreme volume undefined when f'(0) + ln g'(0) <= 0");
      }
      const double v = method == VolumeMethod::RFK ? volume_rfk(d, margin, n)
                                                   : volume_liyau(d, margin, n);
      return make(name, QuantityKind::ExtremeVolume, v, std::move(in));
    }
  }
  throw ParameterError("unknown volume method");
}

std::pair<double, double> fisher_speeds(double d, const ReactionTerm& f, double drift) {
  require_d(d);
  const double r = f.slope_at_zero();
  if (!(r > 0.0)) throw ParameterError("spreading speeds need f'(0) > 0");
  const double c = 2.0 * std::sqrt(d * r);
  return {c + drift, c - drift};
}

std::vector<ThresholdReport> application_preset(Preset preset, const PresetParams& p) {
  require_d(p.d);
  if (!(p.gamma >= 0.0)) throw ParameterError("mortality gamma must be nonnegative");
  std::vector<ThresholdReport> out;

  switch (preset) {
    case Preset::MarineReserve: {
      if (!p.map || !(std::holds_alternative<growth::BevertonHolt>(p.map->family()) ||
                      std::holds_alternative<growth::Ricker>(p.map->family()))) {
        throw ParameterError("marine preset needs a Beverton-Holt (lambda) or Ricker (r) map");
      }
      if (p.n != 2 && p.n != 3) throw ParameterError("marine preset supports n = 2 or 3");
      if (!(p.drift_norm >= 0.0)) throw ParameterError("drift magnitude must be nonnegative");
      const double gp = p.map->slope_at_zero();
      const double margin = std::log(gp) - p.gamma;
      const double drift2 = p.drift_norm * p.drift_norm;
      ThresholdInputs in{p.d, p.drift_norm, -p.gamma, gp, p.n, "marine"};

      const double L = hypercube_side(p.d, drift2, margin, p.n);
      out.push_back(std::isinf(L) ? unbounded("L_star", QuantityKind::CriticalLength, in)
                                  : make("L_star", QuantityKind::CriticalLength, L, in));
      const double R = ball_radius(p.d, margin, p.n);
      auto in_ball = in;
      in_ball.drift_norm = 0.0;
      out.push_back(std::isinf(R) ? unbounded("R_star", QuantityKind::CriticalRadius, in_ball)
                                  : make("R_star", QuantityKind::CriticalRadius, R, in_ball));
      if (p.volume) {
        if (!(*p.volume > 0.0)) throw ParameterError("habitat volume must be positive");
        double bound = 0.0;
        if (p.n == 2) {
          const double j = ball_bessel_zero(2);
          bound = p.d * j * j / *p.volume;
        } else {
          bound = p.d * std::pow(4.0 * std::pow(kPi, 4) / (3.0 * *p.volume), 2.0 / 3.0);
        }
        out.push_back(make("gamma_ex", QuantityKind::PresetParameter, bound - std::log(gp), in));
      }
      break;
    }
    case Preset::TerrestrialReserve: {
      if (!(p.lambda > 0.0)) throw ParameterError("Beverton-Holt lambda must be positive");
      require_two_lengths(p);
      const double margin = std::log1p(p.lambda) - p.gamma;
      if (!(margin > 0.0)) throw ParameterError("terrestrial preset needs ln(1+lambda) > gamma");
      const double L1s = p.lengths[0] * p.lengths[0];
      const double L2s = p.lengths[1] * p.lengths[1];
      ThresholdInputs in{p.d, 0.0, -p.gamma, 1.0 + p.lambda, 2, "terrestrial"};
      out.push_back(make("d_star", QuantityKind::PresetParameter,
                         margin * L1s * L2s / (kPi * kPi * (L1s + L2s)), in));
      const double area = p.volume.value_or(p.lengths[0] * p.lengths[1]);
      if (!(area > 0.0)) throw ParameterError("habitat area must be positive");
      const double j = ball_bessel_zero(2);
      out.push_back(make("d_ex", QuantityKind::PresetParameter, area * margin / (kPi * j * j), in));
      break;
    }
    case Preset::InsectPest: {
      if (!(p.r > 0.0)) throw ParameterError("logistic rate r must be positive");
      require_two_lengths(p);
      ThresholdInputs in{p.d, 0.0, p.r, 0.0, 2, "pest"};
      const double s_star = -std::expm1(p.d * kPi * kPi * inverse_square_sum(p.lengths) - p.r);
      auto rs = make("s_star", QuantityKind::PresetParameter, s_star, in);
      if (!(s_star > 0.0)) rs.regime = kRegimeNoPersistence;
      out.push_back(rs);
      const double area = p.volume.value_or(p.lengths[0] * p.lengths[1]);
      if (!(area > 0.0)) throw ParameterError("habitat area must be positive");
      const double j = ball_bessel_zero(2);
      const double s_ex = -std::expm1(p.d * kPi * j * j / area - p.r);
      auto re = make("s_ex", QuantityKind::PresetParameter, s_ex, in);
      if (!(s_ex > 0.0)) re.regime = kRegimeNoPersistence;
      out.push_back(re);
      break;
    }
    case Preset::ClimateChange: {
      if (!(p.lambda > 0.0)) throw ParameterError("Beverton-Holt lambda must be positive");
      require_two_lengths(p);
      const double margin = std::log1p(p.lambda) - p.gamma;
      const double c2 = 4.0 * p.d * margin -
                        4.0 * p.d * p.d * kPi * kPi * inverse_square_sum(p.lengths);
      ThresholdInputs in{p.d, 0.0, -p.gamma, 1.0 + p.lambda, 2, "climate"};
      if (c2 > 0.0) {
        out.push_back(make("c_max", QuantityKind::Speed, std::sqrt(c2), in));
      } else {
        auto r = make("c_max", QuantityKind::Speed, 0.0, in);
        r.regime = kRegimeNoPersistence;
        out.push_back(r);
      }
      break;
    }
  }
  return out;
}

}  // namespace critpatch
