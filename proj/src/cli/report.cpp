#include "report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include "critpatch/errors.hpp"

namespace critpatch::cli {

using nlohmann::json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json to_json(const ThresholdReport& t) {
  return {{"value", number(t.value)},
          {"kind", to_string(t.kind)},
          {"regime", t.regime},
          {"inputs",
           {{"d", t.inputs.d},
            {"drift_norm", t.inputs.drift_norm},
            {"fprime0", t.inputs.fprime0},
            {"gprime0", t.inputs.gprime0},
            {"n", t.inputs.n},
            {"method", t.inputs.method}}}};
}

json to_json(const SpectralResult& s) {
  json j{{"value", number(s.lambda1)},
         {"method", to_string(s.method)},
         {"residual", number(s.residual)}};
  if (s.spacing) j["spacing"] = *s.spacing;
  if (s.method == SpectralMethod::NumericGrid) {
    j["upwind"] = s.upwind;
    j["iterations"] = s.iterations;
  }
  return j;
}

json to_json(const Classification& c) {
  return {{"verdict", to_string(c.verdict)},
          {"growth_factor", number(c.growth_factor)},
          {"cycles", c.cycles},
          {"lambda1", number(c.lambda1)},
          {"threshold_margin", number(c.threshold_margin)},
          {"final_sup", number(c.final_sup)},
          {"probe_min", number(c.probe_min)}};
}

json provenance(const RunConfig& config, const ClassifierTolerances& tol) {
  return {{"version", kVersion},
          {"tolerances",
           {{"eigen_residual", config.tol},
            {"inner_solve", 1e-10},
            {"dt", config.dt},
            {"extinction", tol.extinction},
            {"persistence_floor", tol.persistence_floor},
            {"stationarity", tol.stationarity},
            {"window", tol.window},
            {"max_cycles", tol.max_cycles}}}};
}

void emit_json(const json& report, const std::optional<std::string>& path,
               std::ostream& fallback) {
  const std::string text = report.dump(2) + "\n";
  if (!path) {
    fallback << text;
    return;
  }
  std::ofstream out(*path, std::ios::binary);
  if (!out) throw IoError("cannot write report to " + *path);
  out << text;
  if (!out) throw IoError("failed writing report to " + *path);
}

void write_csv(const CsvTable& table, std::ostream& out) {
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
}

void write_csv(const CsvTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write CSV to " + path);
  write_csv(table, out);
  if (!out) throw IoError("failed writing CSV to " + path);
}

void write_field(const Grid& grid, const std::vector<double>& values, const std::string& path) {
  if (values.size() != grid.interior_count()) {
    throw ParameterError("field does not match its grid");
  }
  static const char* const axes[] = {"x", "y", "z"};
  CsvTable table;
  for (int a = 0; a < grid.dimension(); ++a) table.header.emplace_back(axes[a]);
  table.header.emplace_back("value");
  table.rows.reserve(grid.lattice_size());
  for (std::size_t node = 0; node < grid.lattice_size(); ++node) {
    const auto x = grid.coordinates(node);
    std::vector<std::string> row;
    for (int a = 0; a < grid.dimension(); ++a) row.push_back(format_number(x[a]));
    const auto u = grid.unknown(node);
    row.push_back(format_number(u < 0 ? 0.0 : values[static_cast<std::size_t>(u)]));
    table.rows.push_back(std::move(row));
  }
  write_csv(table, path);
}

}  // namespace critpatch::cli
