#pragma once

// Critical habitat sizes and extreme volumes for the impulsive model, plus
// the four application presets.

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "critpatch/kinetics.hpp"

namespace critpatch {

enum class QuantityKind {
  CriticalLength,
  CriticalRadius,
  LengthConstraint,
  ExtremeVolume,
  Speed,
  PresetParameter
};

std::string to_string(QuantityKind k);

inline constexpr const char* kRegimeFinite = "finite";
inline constexpr const char* kRegimeUnbounded = "arbitrarily large";
inline constexpr const char* kRegimeNoPersistence = "no persistence possible";

struct ThresholdInputs {
  double d = 0.0;
  double drift_norm = 0.0;
  double fprime0 = 0.0;
  double gprime0 = 0.0;
  int n = 0;
  std::string method;
};

struct ThresholdReport {
  std::string name;
  QuantityKind kind = QuantityKind::CriticalLength;
  /// May be +infinity; `regime` then says why.
  double value = 0.0;
  std::string regime = kRegimeFinite;
  ThresholdInputs inputs;

  bool finite() const { return regime == kRegimeFinite; }
};

enum class Verdict { Extinction, Persistence, Inconclusive };

std::string to_string(Verdict v);

/// rho < 1 -> Extinction, rho > 1 -> Persistence, rho == 1 -> Inconclusive.
Verdict predict_from_growth_factor(double rho);

/// |Omega| < V_ex -> Extinction; otherwise Inconclusive (the volume bound
/// makes no persistence claim, and equality is treated as undecided).
Verdict predict_from_volume(double domain_volume, double extreme_volume);

/// Target value S* of sum 1/L_i^2:
/// S* = [f'(0) + ln g'(0) - |a|^2/(4d)] / (d pi^2). Extinction iff
/// sum 1/L_i^2 > S*. Infinite ("arbitrarily large") when the bracket is <= 0.
ThresholdReport critical_rect_constraint(double d, std::span<const double> drift,
                                         const ReactionTerm& f, const GrowthMap& g);

/// Side of the critical hypercube:
/// L* = 2 pi d sqrt(n / (4d[f'(0) + ln g'(0)] - |a|^2)).
ThresholdReport critical_hypercube_L(double d, std::span<const double> drift,
                                     const ReactionTerm& f, const GrowthMap& g, int n);

/// R* = j_{n/2-1,1} sqrt(d / (f'(0) + ln g'(0))).
ThresholdReport critical_radius_ball(double d, const ReactionTerm& f, const GrowthMap& g,
                                     int n);

enum class VolumeMethod { RFK, Rect, LiYau };

std::string to_string(VolumeMethod m);

/// Volume below which every habitat shape goes extinct.
///   RFK:   (1/Gamma(1+n/2)) (d pi j^2_{n/2-1,1} / m)^{n/2}
///   Rect:  (4 d^2 pi^2 n / (4 d m - |a|^2))^{n/2}, or +infinity
///   LiYau: Gamma(1+n/2) (4 d n pi / ((n+2) m))^{n/2}
/// with m = f'(0) + ln g'(0). RFK and LiYau ignore the (divergence-free)
/// drift and throw ParameterError when m <= 0.
ThresholdReport extreme_volume(VolumeMethod method, double d, std::span<const double> drift,
                               const ReactionTerm& f, const GrowthMap& g, int n);

/// Fisher-KPP spreading speeds c_{+/-} = 2 sqrt(d f'(0)) +/- a.
std::pair<double, double> fisher_speeds(double d, const ReactionTerm& f, double drift);

enum class Preset { MarineReserve, TerrestrialReserve, InsectPest, ClimateChange };

std::string to_string(Preset p);
Preset preset_from_string(const std::string& name);

/// Inputs for application_preset. Which fields are read depends on the
/// preset:
///   MarineReserve: d, gamma, map (Beverton-Holt or Ricker), n (2 or 3),
///     drift_norm, optional volume.
///   TerrestrialReserve: lambda, gamma, lengths {L1, L2}, optional volume
///     (defaults to L1 L2).
///   InsectPest: d, r, lengths {L1, L2}, optional volume.
///   ClimateChange: d, lambda, gamma, lengths {L1, L2}.
struct PresetParams {
  double d = 1.0;
  double gamma = 0.0;
  double lambda = 0.0;
  double r = 0.0;
  std::optional<GrowthMap> map;
  int n = 2;
  double drift_norm = 0.0;
  std::vector<double> lengths;
  std::optional<double> volume;
};

std::vector<ThresholdReport> application_preset(Preset preset, const PresetParams& params);

}  // namespace critpatch
