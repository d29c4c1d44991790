#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "critpatch/cli.hpp"
#include "critpatch/errors.hpp"
#include "critpatch/simulation.hpp"
#include "critpatch/spectral.hpp"
#include "critpatch/thresholds.hpp"
#include "report.hpp"

namespace critpatch::cli {

namespace {

using nlohmann::json;

struct Problem {
  Domain domain;
  std::vector<double> drift;
  double spacing;
};

Problem problem_of(const RunConfig& c, bool for_eigen) {
  Domain dom = parse_domain(*c.domain);
  std::vector<double> drift = c.drift;
  if (drift.empty()) drift.assign(static_cast<std::size_t>(dom.dimension()), 0.0);
  const double h = c.h.value_or(default_spacing(dom, for_eigen));
  return {std::move(dom), std::move(drift), h};
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

ClassifierTolerances tolerances_of(const RunConfig& c) {
  ClassifierTolerances t;
  t.max_cycles = c.max_cycles;
  return t;
}

json base_report(const RunConfig& c) {
  return {{"config", to_json(c)}, {"provenance", provenance(c, tolerances_of(c))}};
}

void add_threshold(json& into, const ThresholdReport& t) { into[t.name] = to_json(t); }

// ---------------------------------------------------------------- eigen

void run_eigen(const RunConfig& c, std::ostream& out) {
  const Problem p = problem_of(c, true);
  json report = base_report(c);

  std::optional<SpectralResult> closed;
  try {
    closed = lambda1_closed(c.d, p.drift, p.domain);
  } catch (const UnsupportedError&) {
  }
  const Grid grid = rasterize(p.domain, p.spacing);
  EigenOptions opts;
  opts.tolerance = c.tol;
  const SpectralResult numeric = lambda1_numeric(grid, c.d, p.drift, opts);

  report["lambda1"] = to_json(closed ? *closed : numeric);
  report["numeric"] = to_json(numeric);
  if (closed) {
    report["numeric"]["relative_difference"] =
        std::abs(numeric.lambda1 - closed->lambda1) / closed->lambda1;
  }
  json bounds;
  bounds["rfk_bound"] = rfk_bound(c.d, p.domain);
  bounds["liyau_bound"] = liyau_bound(1, c.d, p.domain);
  bounds["volume"] = volume(p.domain);
  report["thresholds"] = bounds;
  if (c.field) write_field(grid, numeric.eigenfunction, *c.field);
  emit_json(report, c.out, out);
}

// ------------------------------------------------------------- critical

PresetParams preset_params(const RunConfig& c) {
  PresetParams p;
  p.d = c.d;
  p.gamma = c.gamma.value_or(0.0);
  p.lambda = c.lambda.value_or(0.0);
  p.r = c.r.value_or(0.0);
  if (c.g) {
    p.map = parse_growth(*c.g);
  } else if (c.lambda) {
    p.map = GrowthMap::beverton_holt(*c.lambda);
  } else if (c.r) {
    p.map = GrowthMap::ricker(*c.r);
  }
  p.n = c.n.value_or(2);
  p.drift_norm = norm(c.drift);
  p.lengths = c.lengths;
  if (p.lengths.empty() && c.domain) {
    const Domain dom = parse_domain(*c.domain);
    if (const auto* r = std::get_if<shape::HyperRect>(&dom.shape())) p.lengths = r->lengths;
  }
  p.volume = c.volume;
  return p;
}

void run_preset(const RunConfig& c, std::ostream& out) {
  json report = base_report(c);
  const Preset preset = preset_from_string(*c.preset);
  json thresholds = json::object();
  for (const auto& t : application_preset(preset, preset_params(c))) add_threshold(thresholds, t);
  report["preset"] = to_string(preset);
  report["thresholds"] = thresholds;
  emit_json(report, c.out, out);
}

int dimension_of(const RunConfig& c) {
  return c.domain ? parse_domain(*c.domain).dimension() : *c.n;
}

std::vector<double> drift_of(const RunConfig& c, int n) {
  return c.drift.empty() ? std::vector<double>(static_cast<std::size_t>(n), 0.0) : c.drift;
}

void run_critical(const RunConfig& c, std::ostream& out) {
  if (c.preset) {
    run_preset(c, out);
    return;
  }
  json report = base_report(c);
  const ReactionTerm f = parse_reaction(*c.f);
  const GrowthMap g = parse_growth(*c.g);
  const int n = dimension_of(c);
  const auto drift = drift_of(c, n);
  const Viability v = check_viability(f, g);
  report["viability"] = {{"viable", v.viable}, {"margin", v.margin}};

  json thresholds = json::object();
  add_threshold(thresholds, critical_rect_constraint(c.d, drift, f, g));
  add_threshold(thresholds, critical_hypercube_L(c.d, drift, f, g, n));
  if (norm(drift) == 0.0) add_threshold(thresholds, critical_radius_ball(c.d, f, g, n));
  for (auto m : {VolumeMethod::RFK, VolumeMethod::Rect, VolumeMethod::LiYau}) {
    if (v.margin > 0.0 || m == VolumeMethod::Rect) {
      add_threshold(thresholds, extreme_volume(m, c.d, drift, f, g, n));
    }
  }
  if (f.slope_at_zero() > 0.0) {
    const auto [plus, minus] = fisher_speeds(c.d, f, drift.empty() ? 0.0 : drift[0]);
    thresholds["fisher_speed_plus"] = plus;
    thresholds["fisher_speed_minus"] = minus;
  }
  report["thresholds"] = thresholds;

  try {
    const auto eq = solve_equilibrium(f, g);
    report["equilibrium"] = eq ? json(*eq) : json(nullptr);
  } catch (const NumericError&) {
    report["equilibrium"] = nullptr;
  }

  if (c.domain) {
    const Domain dom = parse_domain(*c.domain);
    try {
      const auto closed = lambda1_closed(c.d, drift, dom);
      const double rho = g.slope_at_zero() * std::exp(f.slope_at_zero() - closed.lambda1);
      report["lambda1"] = to_json(closed);
      report["prediction"] = {{"growth_factor", rho},
                              {"verdict", to_string(predict_from_growth_factor(rho))}};
    } catch (const UnsupportedError&) {
    }
  }
  emit_json(report, c.out, out);
}

// --------------------------------------------------------------- volume

void run_volume(const RunConfig& c, std::ostream& out) {
  json report = base_report(c);
  const ReactionTerm f = parse_reaction(*c.f);
  const GrowthMap g = parse_growth(*c.g);
  const int n = dimension_of(c);
  const auto drift = drift_of(c, n);
  std::vector<VolumeMethod> methods;
  if (c.method == "all" || c.method == "rfk") methods.push_back(VolumeMethod::RFK);
  if (c.method == "all" || c.method == "rect") methods.push_back(VolumeMethod::Rect);
  if (c.method == "all" || c.method == "liyau") methods.push_back(VolumeMethod::LiYau);

  std::optional<double> vol;
  if (c.domain) vol = volume(parse_domain(*c.domain));
  json thresholds = json::object();
  json predictions = json::object();
  for (auto m : methods) {
    const auto t = extreme_volume(m, c.d, drift, f, g, n);
    add_threshold(thresholds, t);
    if (vol) predictions[t.name] = to_string(predict_from_volume(*vol, t.value));
  }
  report["thresholds"] = thresholds;
  if (vol) {
    report["domain_volume"] = *vol;
    report["prediction"] = predictions;
  }
  emit_json(report, c.out, out);
}

// ---------------------------------------------------- simulate / classify

struct PointResult {
  SpectralResult eigen;
  double rho = 0.0;
  Classification classification;
};

struct Setup {
  std::shared_ptr<const Grid> grid;
  SpectralResult eigen;
  std::optional<SeasonPropagator> propagator;
  FieldState initial;
  GrowthMap g = GrowthMap::linear(1.0);
  double rho = 0.0;
};

Setup set_up(const RunConfig& c) {
  const Problem p = problem_of(c, false);
  const ReactionTerm f = parse_reaction(*c.f);
  Setup s;
  s.g = parse_growth(*c.g);
  s.grid = std::make_shared<const Grid>(rasterize(p.domain, p.spacing));
  EigenOptions opts;
  opts.tolerance = c.tol;
  s.eigen = lambda1_numeric(*s.grid, c.d, p.drift, opts);
  s.propagator.emplace(s.grid, c.d, p.drift, f, PropagatorOptions{c.dt});
  s.initial = c.init == "eigen" ? eigenmode_state(s.grid, s.eigen, c.amplitude)
                                : bump_state(s.grid, c.amplitude);
  s.rho = s.g.slope_at_zero() * std::exp(f.slope_at_zero() - s.eigen.lambda1);
  return s;
}

PointResult classify_point(const RunConfig& c) {
  Setup s = set_up(c);
  PointResult r;
  r.eigen = s.eigen;
  r.rho = s.rho;
  r.classification =
      iterate_and_classify(s.initial, s.g, *s.propagator, s.eigen.lambda1, tolerances_of(c));
  return r;
}

CsvTable trajectory_table(const std::vector<double>& sup, const std::vector<double>& mass) {
  CsvTable t;
  t.header = {"cycle", "sup", "mass"};
  for (std::size_t m = 0; m < sup.size(); ++m) {
    t.rows.push_back({std::to_string(m), format_number(sup[m]), format_number(mass[m])});
  }
  return t;
}

void run_simulate(const RunConfig& c, std::ostream& out) {
  json report = base_report(c);
  Setup s = set_up(c);
  FieldState state = s.initial;
  std::vector<double> sup{state.sup()};
  std::vector<double> mass{state.mass()};
  for (int m = 1; m <= c.max_cycles; ++m) {
    state = s.propagator->impulse_cycle(state, s.g);
    sup.push_back(state.sup());
    mass.push_back(state.mass());
  }
  report["lambda1"] = to_json(s.eigen);
  report["simulation"] = {{"cycles", c.max_cycles},
                          {"final_sup", sup.back()},
                          {"final_mass", mass.back()},
                          {"growth_factor", mass[mass.size() - 2] > 0.0
                                                ? number(mass.back() / mass[mass.size() - 2])
                                                : json(nullptr)},
                          {"linearized_growth_factor", number(s.rho)},
                          {"upwind", s.propagator->upwind()}};
  if (c.csv) write_csv(trajectory_table(sup, mass), *c.csv);
  if (c.field) write_field(*s.grid, state.values, *c.field);
  emit_json(report, c.out, out);
}

void run_classify(const RunConfig& c, std::ostream& out) {
  json report = base_report(c);
  const PointResult r = classify_point(c);
  report["lambda1"] = to_json(r.eigen);
  json cls = to_json(r.classification);
  cls["linearized_growth_factor"] = number(r.rho);
  cls["prediction"] = to_string(predict_from_growth_factor(r.rho));
  report["classification"] = cls;
  if (c.csv) {
    write_csv(trajectory_table(r.classification.sup_history, r.classification.mass_history),
              *c.csv);
  }
  emit_json(report, c.out, out);
}

// ---------------------------------------------------------------- sweep

std::string with_first_param(const std::string& family, std::vector<double> params, double v) {
  params.at(0) = v;
  std::string spec = family + ":";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) spec += ",";
    spec += format_number(params[i]);
  }
  return spec;
}

RunConfig at_point(const RunConfig& base, const std::vector<std::pair<std::string, double>>& pt) {
  RunConfig c = base;
  c.command = "classify";
  c.axes.clear();
  for (const auto& [name, v] : pt) {
    if (name == "L") {
      const auto n = parse_domain(*c.domain).dimension();
      std::string spec = "rect:";
      for (int i = 0; i < n; ++i) spec += (i ? "," : "") + format_number(v);
      c.domain = spec;
    } else if (name == "R") {
      const auto n = parse_domain(*c.domain).dimension();
      c.domain = "ball:" + format_number(v) + "@" + std::to_string(n);
    } else if (name == "d") {
      c.d = v;
    } else if (name == "a") {
      const auto n = parse_domain(*c.domain).dimension();
      c.drift.assign(static_cast<std::size_t>(n), 0.0);
      c.drift[0] = v;
    } else if (name == "f1") {
      const auto f = parse_reaction(*c.f);
      c.f = with_first_param(f.family_name(), f.parameters(), v);
    } else if (name == "g1") {
      const auto g = parse_growth(*c.g);
      c.g = with_first_param(g.family_name(), g.parameters(), v);
    }
  }
  return c;
}

void run_sweep(const RunConfig& c, std::ostream& out) {
  json report = base_report(c);
  std::vector<std::vector<std::pair<std::string, double>>> points;
  const AxisSpec& first = c.axes[0];
  for (int i = 0; i < first.steps; ++i) {
    if (c.axes.size() == 1) {
      points.push_back({{first.name, first.value(i)}});
      continue;
    }
    const AxisSpec& second = c.axes[1];
    for (int k = 0; k < second.steps; ++k) {
      points.push_back({{first.name, first.value(i)}, {second.name, second.value(k)}});
    }
  }

  std::vector<PointResult> results(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        results[i] = classify_point(at_point(c, points[i]));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int jobs = std::min<int>(c.jobs, static_cast<int>(points.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  CsvTable table;
  for (const auto& ax : c.axes) table.header.push_back(ax.name);
  for (const char* col : {"lambda1", "rho", "verdict", "cycles", "growth_factor"}) {
    table.header.emplace_back(col);
  }
  json rows = json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& r = results[i];
    std::vector<std::string> row;
    json jr;
    for (const auto& [name, v] : points[i]) {
      row.push_back(format_number(v));
      jr[name] = v;
    }
    row.push_back(format_number(r.eigen.lambda1));
    row.push_back(format_number(r.rho));
    row.push_back(to_string(r.classification.verdict));
    row.push_back(std::to_string(r.classification.cycles));
    row.push_back(format_number(r.classification.growth_factor));
    jr["lambda1"] = number(r.eigen.lambda1);
    jr["rho"] = number(r.rho);
    jr["verdict"] = to_string(r.classification.verdict);
    jr["cycles"] = r.classification.cycles;
    jr["growth_factor"] = number(r.classification.growth_factor);
    table.rows.push_back(std::move(row));
    rows.push_back(std::move(jr));
  }
  report["sweep"] = rows;
  if (c.csv) write_csv(table, *c.csv);
  emit_json(report, c.out, out);
}

// -------------------------------------------------------------- parsing

/// Registers the shared flags on `sub`. Each flag, when given, overwrites
/// the matching field of the config loaded from --config.
struct FlagBinder {
  RunConfig flags;
  std::string drift_text;
  std::string lengths_text;
  std::vector<std::string> axis_texts;
  std::optional<std::string> config_path;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> appliers;

  template <class T>
  void bind(CLI::App* sub, const std::string& name, T& slot, const std::string& help,
            std::function<void(RunConfig&)> apply) {
    appliers.emplace_back(sub->add_option(name, slot, help), std::move(apply));
  }

  void add_to(CLI::App* sub) {
    auto& f = flags;
    bind(sub, "--domain", f.domain, "rect:L1[,L2[,L3]] | ball:R@n | mask:PATH",
         [&f](RunConfig& c) { c.domain = f.domain; });
    bind(sub, "--d", f.d, "diffusivity", [&f](RunConfig& c) { c.d = f.d; });
    bind(sub, "--a", drift_text, "drift vector, comma separated",
         [this](RunConfig& c) { c.drift = parse_list(drift_text); });
    bind(sub, "--f", f.f, "reaction term: logistic:r | linear:b | quadratic:alpha,beta",
         [&f](RunConfig& c) { c.f = f.f; });
    bind(sub, "--g", f.g, "growth map: linear:b | ricker:r | bh:lambda | skellam:R,b",
         [&f](RunConfig& c) { c.g = f.g; });
    bind(sub, "--h", f.h, "grid spacing", [&f](RunConfig& c) { c.h = f.h; });
    bind(sub, "--dt", f.dt, "time step within a season", [&f](RunConfig& c) { c.dt = f.dt; });
    bind(sub, "--max-cycles", f.max_cycles, "impulse cycles (simulate) or cap (classify)",
         [&f](RunConfig& c) { c.max_cycles = f.max_cycles; });
    bind(sub, "--n", f.n, "dimension when no domain is given", [&f](RunConfig& c) { c.n = f.n; });
    bind(sub, "--preset", f.preset, "marine | terrestrial | pest | climate",
         [&f](RunConfig& c) { c.preset = f.preset; });
    bind(sub, "--gamma", f.gamma, "mortality rate", [&f](RunConfig& c) { c.gamma = f.gamma; });
    bind(sub, "--lambda", f.lambda, "Beverton-Holt lambda",
         [&f](RunConfig& c) { c.lambda = f.lambda; });
    bind(sub, "--r", f.r, "intrinsic growth rate", [&f](RunConfig& c) { c.r = f.r; });
    bind(sub, "--L", lengths_text, "habitat side lengths, comma separated",
         [this](RunConfig& c) { c.lengths = parse_list(lengths_text); });
    bind(sub, "--volume", f.volume, "habitat volume", [&f](RunConfig& c) { c.volume = f.volume; });
    bind(sub, "--tol", f.tol, "eigen residual tolerance", [&f](RunConfig& c) { c.tol = f.tol; });
    bind(sub, "--method", f.method, "volume bound: rfk | rect | liyau | all",
         [&f](RunConfig& c) { c.method = f.method; });
    bind(sub, "--init", f.init, "initial state: eigen | bump",
         [&f](RunConfig& c) { c.init = f.init; });
    bind(sub, "--amplitude", f.amplitude, "initial state maximum",
         [&f](RunConfig& c) { c.amplitude = f.amplitude; });
    bind(sub, "--axis", axis_texts, "sweep axis name:min:max:steps (L, R, d, a, f1, g1)",
         [this](RunConfig& c) {
           c.axes.clear();
           for (const auto& t : axis_texts) c.axes.push_back(AxisSpec::parse(t));
         });
    bind(sub, "--out", f.out, "JSON report path", [&f](RunConfig& c) { c.out = f.out; });
    bind(sub, "--field", f.field, "field CSV path", [&f](RunConfig& c) { c.field = f.field; });
    bind(sub, "--csv", f.csv, "trajectory or sweep CSV path",
         [&f](RunConfig& c) { c.csv = f.csv; });
    bind(sub, "--jobs", f.jobs, "parallel sweep points", [&f](RunConfig& c) { c.jobs = f.jobs; });
    sub->add_option("--config", config_path, "JSON config; flags override it");
  }

  RunConfig resolve(const std::string& command) const {
    RunConfig c;
    if (config_path) {
      std::ifstream in(*config_path);
      if (!in) throw IoError("cannot open config file " + *config_path);
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        throw ParameterError("config file is not valid JSON: " + std::string(e.what()));
      }
      c = config_from_json(j);
    }
    for (const auto& [opt, apply] : appliers) {
      if (opt->count() > 0) apply(c);
    }
    if (!c.command.empty() && c.command != command) {
      throw ParameterError("config file is for '" + c.command + "', not '" + command + "'");
    }
    c.command = command;
    return c;
  }
};

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Critical patch sizes and persistence for impulsive reaction-diffusion models",
               "critpatch"};
  // --h is the grid spacing, so help is long-form only.
  app.set_help_flag("--help", "print help and exit");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  const std::vector<std::pair<const char*, const char*>> commands{
      {"eigen", "principal eigenvalue of the transport operator"},
      {"critical", "critical sizes, extreme volumes and speeds"},
      {"volume", "extreme volumes below which every shape goes extinct"},
      {"simulate", "run a fixed number of impulse cycles"},
      {"classify", "iterate until extinction or persistence is detected"},
      {"preset", "application presets"},
      {"sweep", "classify over a 1-D or 2-D parameter grid"}};
  // One binder per subcommand keeps option storage separate.
  std::vector<std::unique_ptr<FlagBinder>> binders;
  for (const auto& [name, help] : commands) {
    binders.push_back(std::make_unique<FlagBinder>());
    binders.back()->add_to(app.add_subcommand(name, help));
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (app.exit(e, out, err) == 0) return 0;
    err << '\n' << app.help();
    return 2;
  }

  try {
    for (std::size_t i = 0; i < commands.size(); ++i) {
      const char* name = commands[i].first;
      if (!app.got_subcommand(name)) continue;
      const RunConfig c = binders[i]->resolve(name);
      validate(c);
      if (c.field && c.command != "eigen" && c.command != "simulate") {
        throw ParameterError("--field applies to eigen and simulate");
      }
      const std::string cmd = c.command;
      if (cmd == "eigen") run_eigen(c, out);
      if (cmd == "critical") run_critical(c, out);
      if (cmd == "volume") run_volume(c, out);
      if (cmd == "simulate") run_simulate(c, out);
      if (cmd == "classify") run_classify(c, out);
      if (cmd == "preset") run_preset(c, out);
      if (cmd == "sweep") run_sweep(c, out);
    }
    return 0;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace critpatch::cli
