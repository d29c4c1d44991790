#pragma once

// JSON and CSV emitters shared by the subcommands.

#include <iosfwd>
#include <string>
#include <vector>

#include "critpatch/cli.hpp"
#include "critpatch/simulation.hpp"
#include "critpatch/spectral.hpp"
#include "critpatch/thresholds.hpp"

namespace critpatch::cli {

/// Non-finite numbers become null.
nlohmann::json number(double v);
nlohmann::json to_json(const ThresholdReport& t);
nlohmann::json to_json(const SpectralResult& s);
nlohmann::json to_json(const Classification& c);
nlohmann::json provenance(const RunConfig& config, const ClassifierTolerances& tol);

/// Shortest text that reads back to the same double.
std::string format_number(double v);

/// Writes the report to `path`, or to `fallback` when path is empty.
void emit_json(const nlohmann::json& report, const std::optional<std::string>& path,
               std::ostream& fallback);

struct CsvTable {
  std::vector<std::string> header;
  /// Cells already formatted.
  std::vector<std::vector<std::string>> rows;
};

void write_csv(const CsvTable& table, std::ostream& out);
void write_csv(const CsvTable& table, const std::string& path);

/// Grid dump with header x[,y[,z]],value; Dirichlet nodes are written as 0.
void write_field(const Grid& grid, const std::vector<double>& values, const std::string& path);

}  // namespace critpatch::cli
