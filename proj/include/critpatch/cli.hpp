#pragma once

// Command-line front end: argument parsing, JSON configs, reports and the
// subcommand dispatcher used by the `critpatch` tool.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "critpatch/geometry.hpp"
#include "critpatch/kinetics.hpp"

namespace critpatch::cli {

inline constexpr const char* kVersion = "0.1.0";

/// One sweep axis, written `name:min:max:steps` on the command line.
/// Names: L (all rectangle sides), R (ball radius), d, a (drift along the
/// first axis), f1 and g1 (first parameter of f and g).
struct AxisSpec {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  int steps = 1;

  double value(int i) const;
  std::string to_string() const;
  static AxisSpec parse(const std::string& text);
};

/// Everything a run depends on. Output paths and the thread count are
/// plumbing and stay out of the JSON echo.
struct RunConfig {
  std::string command;
  std::optional<std::string> domain;  // rect:L1[,L2[,L3]] | ball:R@n | mask:PATH
  double d = 1.0;
  std::vector<double> drift;
  std::optional<std::string> f;  // logistic:r | linear:b | quadratic:alpha,beta
  std::optional<std::string> g;  // linear:b | ricker:r | bh:lambda | skellam:R,b
  std::optional<double> h;
  double dt = 1e-3;
  int max_cycles = 200;
  std::optional<int> n;
  std::optional<std::string> preset;
  std::optional<double> gamma;
  std::optional<double> lambda;
  std::optional<double> r;
  std::vector<double> lengths;
  std::optional<double> volume;
  double tol = 1e-6;
  std::string method = "all";  // volume: rfk | rect | liyau | all
  std::string init = "eigen";  // eigen | bump
  double amplitude = 0.1;
  std::vector<AxisSpec> axes;

  std::optional<std::string> out;
  std::optional<std::string> field;
  std::optional<std::string> csv;
  int jobs = 1;
};

Domain parse_domain(const std::string& spec);
ReactionTerm parse_reaction(const std::string& spec);
GrowthMap parse_growth(const std::string& spec);
std::vector<double> parse_list(const std::string& text);

/// Throws ParameterError when the config is inconsistent for its command.
void validate(const RunConfig& config);

nlohmann::json to_json(const RunConfig& config);
/// Inverse of to_json; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j);

/// Grid spacing used when --h is absent: the longest extent divided by a
/// per-dimension count, finer for eigenvalue work than for time stepping.
double default_spacing(const Domain& domain, bool for_eigen);

/// Runs one invocation (argv without the program name). Writes the JSON
/// report to --out, or to `out` when no path is given. Returns 0 on
/// success, 2 on validation errors, 3 on numeric or I/O failures.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace critpatch::cli
