#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "critpatch/cli.hpp"
#include "critpatch/errors.hpp"

using namespace critpatch;
using namespace critpatch::cli;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "critpatch_cli_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

const std::vector<std::string> kFisher1d{"--domain", "rect:0.3", "--d", "0.01",
                                         "--f",      "logistic:1", "--g", "linear:1"};

std::vector<std::string> cat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("spec parsers") {
  CHECK(parse_domain("rect:1,2").dimension() == 2);
  CHECK(parse_domain("ball:1.5@3").is_ball());
  CHECK(parse_reaction("quadratic:0.5,2").family_name() == "quadratic");
  CHECK(parse_growth("bh:1.5").slope_at_zero() == doctest::Approx(2.5));
  CHECK(parse_growth("skellam:2,0.5").slope_at_zero() == doctest::Approx(1.0));
  CHECK_THROWS_AS(parse_domain("square:1"), ParameterError);
  CHECK_THROWS_AS(parse_domain("rect:1,x"), ParameterError);
  CHECK_THROWS_AS(parse_domain("ball:1"), ParameterError);
  CHECK_THROWS_AS(parse_reaction("logistic:1,2"), ParameterError);
  CHECK_THROWS_AS(parse_growth("ricker"), ParameterError);
  CHECK(AxisSpec::parse("L:0.5:1.5:11").value(10) == doctest::Approx(1.5));
  CHECK_THROWS_AS(AxisSpec::parse("Q:0:1:2"), ParameterError);
  CHECK_THROWS_AS(AxisSpec::parse("L:0:1:0"), ParameterError);
}

TEST_CASE("eigen reports the closed form with a numeric cross-check") {
  const auto field = scratch("eigen_field.csv");
  const auto r = run({"eigen", "--domain", "rect:1,1", "--d", "1", "--a", "0,0", "--field",
                      field.string()});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["lambda1"]["value"].get<double>() == doctest::Approx(19.7392).epsilon(1e-5));
  CHECK(j["lambda1"]["method"] == "closed_form_rect");
  CHECK(j["numeric"]["relative_difference"].get<double>() < 0.01);
  CHECK(j["provenance"]["version"] == kVersion);

  const auto rows = read_csv(field);
  REQUIRE(rows.size() > 1);
  CHECK(rows[0] == std::vector<std::string>{"x", "y", "value"});
  double peak = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) peak = std::max(peak, std::stod(rows[i][2]));
  CHECK(peak == 1.0);
}

TEST_CASE("marine preset through critical") {
  const auto r = run({"critical", "--preset", "marine", "--gamma", "0.5", "--lambda", "1.71828",
                      "--d", "1", "--n", "2"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["thresholds"]["L_star"]["value"].get<double>() == doctest::Approx(6.28319).epsilon(1e-5));
}

TEST_CASE("critical without a preset") {
  const auto r = run({"critical", "--n", "1", "--d", "1", "--a", "1.1", "--f", "logistic:0.25",
                      "--g", "linear:1"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["thresholds"]["L_star"]["regime"] == "arbitrarily large");
  CHECK(j["thresholds"]["L_star"]["value"].is_null());
  // With g the identity the season integral is empty, so no bracket exists.
  CHECK(j["equilibrium"].is_null());
  CHECK(j["viability"]["margin"].get<double>() == doctest::Approx(0.25));
}

TEST_CASE("volume predictions") {
  const auto r = run({"volume", "--domain", "rect:1,1", "--f", "logistic:1", "--g", "linear:1"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  // V_ex for the RFK bound is pi j^2 = 18.17 > 1.
  CHECK(j["prediction"]["V_ex_rfk"] == "Extinction");
  CHECK(j["thresholds"]["V_ex_rect"]["value"].get<double>() ==
        doctest::Approx(2 * std::numbers::pi * std::numbers::pi));
}

TEST_CASE("classify below the marine critical side goes extinct") {
  const auto r = run({"classify", "--domain", "rect:5.65,5.65", "--d", "1", "--f", "linear:-0.5",
                      "--g", "bh:1.718281828459045"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["classification"]["verdict"] == "Extinction");
  CHECK(j["classification"]["linearized_growth_factor"].get<double>() < 1.0);
}

TEST_CASE("reports round-trip through the config reader") {
  const auto r = run(cat({"simulate", "--max-cycles", "3", "--h", "0.005"}, kFisher1d));
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  const RunConfig c = config_from_json(j["config"]);
  CHECK_NOTHROW(validate(c));
  CHECK(to_json(c) == j["config"]);
  CHECK(c.max_cycles == 3);
  CHECK(*c.h == 0.005);
}

TEST_CASE("config file with flag overrides") {
  const auto cfg = scratch("config.json");
  {
    std::ofstream out(cfg);
    out << R"({"domain": "rect:0.3", "d": 0.01, "f": "logistic:1", "g": "linear:1",
               "max_cycles": 7})";
  }
  const auto r = run({"simulate", "--config", cfg.string(), "--max-cycles", "2"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["config"]["max_cycles"] == 2);
  CHECK(j["simulation"]["cycles"] == 2);
  CHECK(j["config"]["d"] == 0.01);

  std::ofstream(scratch("bad_config.json")) << R"({"domain": "rect:1", "colour": 3})";
  CHECK(run({"simulate", "--config", scratch("bad_config.json").string()}).code == 2);
}

TEST_CASE("identical configs give identical reports") {
  const auto args = cat({"classify", "--max-cycles", "20"}, kFisher1d);
  const auto a = run(args);
  const auto b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("sweep rows do not depend on the thread count") {
  const auto csv1 = scratch("sweep_j1.csv");
  const auto csv3 = scratch("sweep_j3.csv");
  const auto base = cat({"sweep", "--axis", "L:0.2:0.4:3", "--axis", "d:0.008:0.012:2",
                         "--max-cycles", "30"},
                        kFisher1d);
  const auto one = run(cat(base, {"--jobs", "1", "--csv", csv1.string()}));
  const auto three = run(cat(base, {"--jobs", "3", "--csv", csv3.string()}));
  REQUIRE(one.code == 0);
  REQUIRE(three.code == 0);
  CHECK(slurp(csv1) == slurp(csv3));
  const auto rows = read_csv(csv1);
  REQUIRE(rows.size() == 7);
  CHECK(rows[0][0] == "L");
  CHECK(rows[0][1] == "d");
  // Lexicographic: first axis outer.
  CHECK(std::stod(rows[1][0]) == doctest::Approx(0.2));
  CHECK(std::stod(rows[2][0]) == doctest::Approx(0.2));
  CHECK(std::stod(rows[2][1]) == doctest::Approx(0.012));
  CHECK(std::stod(rows[3][0]) == doctest::Approx(0.3));
  // --jobs and --csv are not echoed, so the reports match byte for byte.
  CHECK(one.out == three.out);
}

TEST_CASE("single-point sweep equals classify") {
  const auto csv = scratch("sweep_single.csv");
  const auto s = run(cat({"sweep", "--axis", "L:0.3:0.3:1", "--csv", csv.string()}, kFisher1d));
  const auto c = run(cat({"classify"}, kFisher1d));
  REQUIRE(s.code == 0);
  REQUIRE(c.code == 0);
  const auto rows = read_csv(csv);
  REQUIRE(rows.size() == 2);
  const json cj = json::parse(c.out);
  CHECK(std::stod(rows[1][1]) == cj["lambda1"]["value"].get<double>());
  CHECK(std::stod(rows[1][2]) == cj["classification"]["linearized_growth_factor"].get<double>());
  CHECK(rows[1][3] == cj["classification"]["verdict"].get<std::string>());
  CHECK(std::stoi(rows[1][4]) == cj["classification"]["cycles"].get<int>());
}

TEST_CASE("sweep across the critical length flips at most once") {
  const double Lstar = 0.1 * std::numbers::pi;
  const auto csv = scratch("sweep_flip.csv");
  std::ostringstream axis;
  axis.precision(17);
  axis << "L:" << 0.5 * Lstar << ":" << 1.5 * Lstar << ":11";
  const auto r = run(cat({"sweep", "--axis", axis.str(), "--csv", csv.string(), "--jobs", "2"},
                         kFisher1d));
  REQUIRE(r.code == 0);
  const auto rows = read_csv(csv);
  REQUIRE(rows.size() == 12);
  std::vector<std::string> decided;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][3] != "Inconclusive") decided.push_back(rows[i][3]);
  }
  int flips = 0;
  for (std::size_t i = 1; i < decided.size(); ++i) flips += decided[i] != decided[i - 1];
  CHECK(flips == 1);
  CHECK(decided.front() == "Extinction");
  CHECK(decided.back() == "Persistence");
}

TEST_CASE("sweep over drift at margin 0.25") {
  const auto csv = scratch("sweep_drift.csv");
  const auto r = run({"sweep", "--domain", "rect:40", "--d", "1", "--f", "logistic:0.25", "--g",
                      "linear:1", "--axis", "a:0:2.2:12", "--csv", csv.string(), "--jobs", "2"});
  REQUIRE(r.code == 0);
  const auto rows = read_csv(csv);
  REQUIRE(rows.size() == 13);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double a = std::stod(rows[i][0]);
    CAPTURE(a);
    if (a * a / 4 > 0.25 + 1e-12) CHECK(rows[i][3] == "Extinction");
  }
  CHECK(rows[1][3] == "Persistence");
}

TEST_CASE("CSV values read back to twelve significant digits") {
  const auto csv = scratch("sweep_roundtrip.csv");
  const auto r = run(cat({"sweep", "--axis", "d:0.009:0.011:3", "--csv", csv.string(),
                          "--max-cycles", "5"},
                         kFisher1d));
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  const auto rows = read_csv(csv);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double lam = j["sweep"][i - 1]["lambda1"].get<double>();
    CHECK(std::abs(std::stod(rows[i][1]) - lam) <= 1e-12 * std::abs(lam));
  }
}

TEST_CASE("exit codes") {
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"eigen", "--nope"}).code == 2);
  CHECK(run({"eigen"}).code == 2);
  CHECK(run({"eigen", "--domain", "rect:1", "--d", "-1"}).code == 2);
  CHECK(run({"eigen", "--domain", "rect:1,1", "--a", "1"}).code == 2);
  CHECK(run({"classify", "--domain", "rect:1"}).code == 2);
  CHECK(run({"sweep", "--domain", "rect:1", "--f", "logistic:1", "--g", "linear:1", "--axis",
             "R:1:2:2"})
            .code == 2);
  CHECK(run({"eigen", "--domain", "mask:/nonexistent/mask.txt"}).code == 3);
  CHECK(run({"eigen", "--domain", "rect:1", "--out", "/nonexistent/dir/report.json"}).code == 3);
  CHECK(run({"--help"}).code == 0);
  const auto bad = run({"eigen", "--nope"});
  CHECK(bad.err.find("Usage") != std::string::npos);
}

TEST_CASE("report written to --out") {
  const auto path = scratch("report.json");
  std::filesystem::remove(path);
  const auto r = run({"preset", "--preset", "climate", "--lambda", "1.718281828459045", "--gamma",
                      "0.5", "--L", "10,10", "--out", path.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  const json j = json::parse(slurp(path));
  CHECK(j["thresholds"]["c_max"]["value"].get<double>() == doctest::Approx(1.100196).epsilon(1e-6));
}

}  // TEST_SUITE
