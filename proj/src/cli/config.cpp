#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

#include "critpatch/cli.hpp"
#include "critpatch/errors.hpp"
#include "critpatch/thresholds.hpp"

namespace critpatch::cli {

namespace {

using nlohmann::json;

const std::set<std::string> kCommands{"eigen",    "critical", "volume", "simulate",
                                      "classify", "preset",   "sweep"};
const std::set<std::string> kAxes{"L", "R", "d", "a", "f1", "g1"};

double parse_number(const std::string& text, const std::string& what) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(v)) {
    throw ParameterError("cannot read " + what + " from '" + text + "'");
  }
  return v;
}

std::pair<std::string, std::string> split_family(const std::string& spec, const char* what) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == spec.size()) {
    throw ParameterError(std::string(what) + " must be written family:params, got '" + spec + "'");
  }
  return {spec.substr(0, colon), spec.substr(colon + 1)};
}

std::vector<double> expect_params(const std::string& family, const std::string& text,
                                  std::size_t count) {
  auto v = parse_list(text);
  if (v.size() != count) {
    throw ParameterError(family + " takes " + std::to_string(count) + " parameter" +
                         (count == 1 ? "" : "s") + ", got " + std::to_string(v.size()));
  }
  return v;
}

bool needs_kinetics(const RunConfig& c) {
  if (c.command == "critical") return !c.preset.has_value();
  return c.command == "volume" || c.command == "simulate" || c.command == "classify" ||
         c.command == "sweep";
}

bool needs_domain(const RunConfig& c) {
  return c.command == "eigen" || c.command == "simulate" || c.command == "classify" ||
         c.command == "sweep";
}

template <class T>
void put(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <class T>
void get(const json& j, const char* key, std::optional<T>& v) {
  if (j.contains(key)) v = j.at(key).get<T>();
}

template <class T>
void get(const json& j, const char* key, T& v) {
  if (j.contains(key)) v = j.at(key).get<T>();
}

}  // namespace

double AxisSpec::value(int i) const {
  if (steps <= 1) return min;
  return min + (max - min) * i / (steps - 1);
}

std::string AxisSpec::to_string() const {
  std::ostringstream s;
  s.precision(17);
  s << name << ':' << min << ':' << max << ':' << steps;
  return s.str();
}

AxisSpec AxisSpec::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ':')) parts.push_back(item);
  if (parts.size() != 4) throw ParameterError("sweep axis must be name:min:max:steps");
  AxisSpec a;
  a.name = parts[0];
  if (!kAxes.count(a.name)) {
    throw ParameterError("unknown sweep axis '" + a.name + "' (use L, R, d, a, f1, g1)");
  }
  a.min = parse_number(parts[1], "axis minimum");
  a.max = parse_number(parts[2], "axis maximum");
  const double steps = parse_number(parts[3], "axis steps");
  if (steps < 1 || steps != std::floor(steps) || steps > 100000) {
    throw ParameterError("axis steps must be a positive integer");
  }
  a.steps = static_cast<int>(steps);
  return a;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) out.push_back(parse_number(item, "number"));
  if (out.empty() || text.back() == ',') throw ParameterError("empty value list '" + text + "'");
  return out;
}

Domain parse_domain(const std::string& spec) {
  const auto [kind, rest] = split_family(spec, "domain");
  if (kind == "rect") return Domain::rect(parse_list(rest));
  if (kind == "ball") {
    const auto at = rest.find('@');
    if (at == std::string::npos) throw ParameterError("ball domain must be ball:R@n");
    const double R = parse_number(rest.substr(0, at), "ball radius");
    const double n = parse_number(rest.substr(at + 1), "ball dimension");
    if (n != std::floor(n)) throw ParameterError("ball dimension must be an integer");
    return Domain::ball(R, static_cast<int>(n));
  }
  if (kind == "mask") return read_mask(rest);
  throw ParameterError("unknown domain kind '" + kind + "' (use rect, ball or mask)");
}

ReactionTerm parse_reaction(const std::string& spec) {
  const auto [family, rest] = split_family(spec, "reaction term");
  if (family == "logistic") return ReactionTerm::logistic(expect_params(family, rest, 1)[0]);
  if (family == "linear") return ReactionTerm::linear(expect_params(family, rest, 1)[0]);
  if (family == "quadratic") {
    const auto p = expect_params(family, rest, 2);
    return ReactionTerm::quadratic(p[0], p[1]);
  }
  throw ParameterError("unknown reaction family '" + family +
                       "' (use logistic, linear or quadratic)");
}

GrowthMap parse_growth(const std::string& spec) {
  const auto [family, rest] = split_family(spec, "growth map");
  if (family == "linear") return GrowthMap::linear(expect_params(family, rest, 1)[0]);
  if (family == "ricker") return GrowthMap::ricker(expect_params(family, rest, 1)[0]);
  if (family == "bh") return GrowthMap::beverton_holt(expect_params(family, rest, 1)[0]);
  if (family == "skellam") {
    const auto p = expect_params(family, rest, 2);
    return GrowthMap::skellam(p[0], p[1]);
  }
  throw ParameterError("unknown growth family '" + family +
                       "' (use linear, ricker, bh or skellam)");
}

double default_spacing(const Domain& domain, bool for_eigen) {
  const int n = domain.dimension();
  const int eigen_counts[] = {256, 64, 24};
  const int step_counts[] = {256, 32, 16};
  const int count = (for_eigen ? eigen_counts : step_counts)[n - 1];
  if (const auto* r = std::get_if<shape::HyperRect>(&domain.shape())) {
    return *std::max_element(r->lengths.begin(), r->lengths.end()) / count;
  }
  if (const auto* b = std::get_if<shape::Ball>(&domain.shape())) return 2.0 * b->radius / count;
  return std::get<shape::Masked>(domain.shape()).spacing;
}

void validate(const RunConfig& c) {
  if (!kCommands.count(c.command)) {
    throw ParameterError("unknown subcommand '" + c.command + "'");
  }
  if (!(c.d > 0.0) || !std::isfinite(c.d)) throw ParameterError("--d must be positive");
  if (!(c.dt > 0.0) || c.dt > 1.0) throw ParameterError("--dt must lie in (0, 1]");
  if (c.max_cycles < 1) throw ParameterError("--max-cycles must be at least 1");
  if (!(c.tol > 0.0)) throw ParameterError("--tol must be positive");
  if (!(c.amplitude > 0.0)) throw ParameterError("--amplitude must be positive");
  if (c.jobs < 1) throw ParameterError("--jobs must be at least 1");
  if (c.h && !(*c.h > 0.0)) throw ParameterError("--h must be positive");
  if (c.n && (*c.n < 1 || *c.n > 3)) throw ParameterError("--n must be 1, 2 or 3");
  for (double v : c.drift) {
    if (!std::isfinite(v)) throw ParameterError("--a must be finite");
  }
  if (c.init != "eigen" && c.init != "bump") throw ParameterError("--init must be eigen or bump");
  if (c.method != "all" && c.method != "rfk" && c.method != "rect" && c.method != "liyau") {
    throw ParameterError("--method must be rfk, rect, liyau or all");
  }

  int dim = c.n.value_or(0);
  if (c.domain) {
    const Domain dom = parse_domain(*c.domain);
    if (c.n && *c.n != dom.dimension()) {
      throw ParameterError("--n disagrees with the domain dimension");
    }
    dim = dom.dimension();
  } else if (needs_domain(c)) {
    throw ParameterError("--domain is required for " + c.command);
  }
  if (dim > 0 && !c.drift.empty() && static_cast<int>(c.drift.size()) != dim) {
    throw ParameterError("--a has " + std::to_string(c.drift.size()) +
                         " components for a " + std::to_string(dim) + "-D problem");
  }

  if (c.f) parse_reaction(*c.f);
  if (c.g) parse_growth(*c.g);
  if (needs_kinetics(c) && (!c.f || !c.g)) {
    throw ParameterError("--f and --g are required for " + c.command);
  }
  if ((c.command == "critical" || c.command == "volume") && !c.preset && dim == 0) {
    throw ParameterError("give --domain or --n for " + c.command);
  }
  if (c.command == "preset" && !c.preset) throw ParameterError("--preset is required");
  if (c.preset) preset_from_string(*c.preset);

  if (c.command == "sweep") {
    if (c.axes.empty() || c.axes.size() > 2) throw ParameterError("sweep takes one or two --axis");
    if (c.axes.size() == 2 && c.axes[0].name == c.axes[1].name) {
      throw ParameterError("sweep axes must differ");
    }
    const Domain dom = parse_domain(*c.domain);
    for (const auto& ax : c.axes) {
      if (ax.name == "L" && !dom.is_rect()) throw ParameterError("axis L needs a rect domain");
      if (ax.name == "R" && !dom.is_ball()) throw ParameterError("axis R needs a ball domain");
      if ((ax.name == "L" || ax.name == "R" || ax.name == "d") && !(ax.min > 0.0 && ax.max > 0.0)) {
        throw ParameterError("axis " + ax.name + " must stay positive");
      }
    }
  } else if (!c.axes.empty()) {
    throw ParameterError("--axis only applies to sweep");
  }
}

json to_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  put(j, "domain", c.domain);
  j["d"] = c.d;
  j["a"] = c.drift;
  put(j, "f", c.f);
  put(j, "g", c.g);
  put(j, "h", c.h);
  j["dt"] = c.dt;
  j["max_cycles"] = c.max_cycles;
  put(j, "n", c.n);
  put(j, "preset", c.preset);
  put(j, "gamma", c.gamma);
  put(j, "lambda", c.lambda);
  put(j, "r", c.r);
  if (!c.lengths.empty()) j["L"] = c.lengths;
  put(j, "volume", c.volume);
  j["tol"] = c.tol;
  j["method"] = c.method;
  j["init"] = c.init;
  j["amplitude"] = c.amplitude;
  if (!c.axes.empty()) {
    json axes = json::array();
    for (const auto& a : c.axes) axes.push_back(a.to_string());
    j["axes"] = axes;
  }
  return j;
}

RunConfig config_from_json(const json& j) {
  static const std::set<std::string> known{
      "command", "domain", "d",      "a",      "f",      "g",    "h",      "dt",
      "max_cycles", "n",   "preset", "gamma",  "lambda", "r",    "L",      "volume",
      "tol",     "method", "init",   "amplitude", "axes", "jobs", "out",   "field", "csv"};
  if (!j.is_object()) throw ParameterError("config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ParameterError("unknown config key '" + key + "'");
  }
  RunConfig c;
  try {
    get(j, "command", c.command);
    get(j, "domain", c.domain);
    get(j, "d", c.d);
    get(j, "a", c.drift);
    get(j, "f", c.f);
    get(j, "g", c.g);
    get(j, "h", c.h);
    get(j, "dt", c.dt);
    get(j, "max_cycles", c.max_cycles);
    get(j, "n", c.n);
    get(j, "preset", c.preset);
    get(j, "gamma", c.gamma);
    get(j, "lambda", c.lambda);
    get(j, "r", c.r);
    get(j, "L", c.lengths);
    get(j, "volume", c.volume);
    get(j, "tol", c.tol);
    get(j, "method", c.method);
    get(j, "init", c.init);
    get(j, "amplitude", c.amplitude);
    get(j, "jobs", c.jobs);
    get(j, "out", c.out);
    get(j, "field", c.field);
    get(j, "csv", c.csv);
    if (j.contains("axes")) {
      for (const auto& a : j.at("axes")) c.axes.push_back(AxisSpec::parse(a.get<std::string>()));
    }
  } catch (const json::exception& e) {
    throw ParameterError(std::string("bad config value: ") + e.what());
  }
  return c;
}

}  // namespace critpatch::cli
