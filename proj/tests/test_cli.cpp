#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "vmoidx/acceptance.hpp"
#include "vmoidx/commands.hpp"
#include "vmoidx/error.hpp"
#include "vmoidx/presets.hpp"

using namespace vmoidx;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::ConfigError;
}

RunConfig preset(const std::string& name) {
  RunConfig c;
  c.preset = name;
  return c;
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("vmoidx_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config text round trip") {
  RunConfig c;
  c.surface = "annulus";
  c.field = "y, x, 0";
  c.datum = "-sin(theta), cos(theta), 0";
  c.eps_grid = {0.1, 0.05, 0.025};
  c.seed = 17;
  c.tol_zero = 3e-10;
  c.tol_jac = 2e-7;
  c.grid = 96;
  c.c1 = 0.5;
  c.c2 = 2.0;
  c.scan = 64;
  c.out = "results";
  const RunConfig d = config_from_text(config_to_text(c));
  CHECK(config_to_text(d) == config_to_text(c));
  CHECK(d.eps_grid == c.eps_grid);
  CHECK(d.tol_zero == c.tol_zero);
  CHECK(d.seed == 17);

  const RunConfig e = config_from_text("# comment\nsurface = torus\n\ntol-zero = 1e-8  \n");
  CHECK(e.surface == "torus");
  CHECK(e.tol_zero == 1e-8);
}

TEST_CASE("config errors") {
  CHECK(code_of([] { config_from_text("colour = red\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { config_from_text("seed = two\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { config_from_text("no equals sign\n"); }) == ErrorCode::ConfigError);
  RunConfig c;
  c.tol_zero = -1.0;
  CHECK(code_of([&] { validate_config(c, 0.5); }) == ErrorCode::ConfigError);
  c = RunConfig{};
  c.eps_grid = {0.1, 0.1};
  CHECK(code_of([&] { validate_config(c, 0.5); }) == ErrorCode::ConfigError);
  c.eps_grid = {0.6, 0.1};
  CHECK(code_of([&] { validate_config(c, 0.5); }) == ErrorCode::ConfigError);
  c.eps_grid = {0.5, 0.1};
  CHECK_NOTHROW(validate_config(c, 0.5));
}

TEST_CASE("report round trip") {
  RunReport r;
  r.command = "index";
  r.config = config_json(RunConfig{});
  r.results = Json{{"ind", -1}, {"values", {1.0 / 3.0, 1e-300, -2.5}}};
  r.exit_code = 2;
  r.error_code = "TopologicalObstruction";
  r.error_message = "x";
  r.seconds = 0.125;
  const RunReport back = report_from_json(Json::parse(dump_report(r)));
  CHECK(dump_report(back) == dump_report(r));
  CHECK(back.results["values"][0].get<double>() == 1.0 / 3.0);

  const auto dir = temp_dir("report");
  std::filesystem::create_directories(dir);
  write_report((dir / "r.json").string(), r);
  CHECK(dump_report(read_report((dir / "r.json").string())) == dump_report(r));

  RunReport later = r;
  later.seconds = 9.0;
  CHECK(equal_modulo_timing(r, later));
  later.results["ind"] = 0;
  CHECK_FALSE(equal_modulo_timing(r, later));

  CHECK(code_of([] { report_from_json(Json{{"command", "index"}}); }) == ErrorCode::ParseError);
  std::ofstream((dir / "bad.json").string()) << "{ not json";
  CHECK(code_of([&] { read_report((dir / "bad.json").string()); }) == ErrorCode::ParseError);
}

TEST_CASE("preset catalog") {
  const std::set<std::string> commands = {"index", "vmo-index", "extend", "linefield"};
  std::set<std::string> names;
  for (const auto& p : preset_catalog()) {
    CHECK(names.insert(p.name).second);
    CHECK(commands.count(p.command) == 1);
    CHECK_FALSE(p.description.empty());
    CHECK((p.command == "extend" ? !p.datum.empty() : !p.field.empty()));
    CHECK_NOTHROW(resolve_surface(p.surface));
  }
  CHECK(code_of([] { find_preset("no-such-preset"); }) == ErrorCode::ConfigError);
  RunConfig c = preset("disk-saddle");
  c.field = "0, 1, 0";
  const RunConfig applied = apply_preset(c);
  CHECK(applied.field == "0, 1, 0");
  CHECK(applied.surface == "disk");
}

TEST_CASE("index command on the model fields") {
  const std::vector<std::tuple<std::string, int, int>> cases = {
      {"disk-constant", 0, 1}, {"disk-rotation", 1, 0}, {"disk-saddle", -1, 2}, {"sphere-rotation", 2, 0},
      {"torus-longitude", 0, 0}};
  for (const auto& [name, ind, ind_minus] : cases) {
    CAPTURE(name);
    const RunReport r = run_command("index", preset(name));
    REQUIRE(r.exit_code == 0);
    CHECK(r.results["index"]["ind"] == ind);
    CHECK(r.results["index"]["ind_minus"] == ind_minus);
    CHECK(r.results["index"]["morse_residual"] == 0);
  }
}

TEST_CASE("runs are deterministic") {
  RunConfig c = preset("disk-saddle");
  c.seed = 5;
  const RunReport a = run_command("index", c);
  const RunReport b = run_command("index", c);
  CHECK(equal_modulo_timing(a, b));
  const RunReport e1 = run_command("extend", preset("extend-constant"));
  const RunReport e2 = run_command("extend", preset("extend-constant"));
  CHECK(e1.exit_code == 0);
  CHECK(equal_modulo_timing(e1, e2));
}

TEST_CASE("exit codes") {
  CHECK(run_command("extend", preset("extend-tangent")).exit_code == 2);
  const RunReport obstructed = run_command("extend", preset("extend-tangent"));
  CHECK(obstructed.results["ind_minus"] == 0);
  CHECK(obstructed.results["chi"] == 1);

  RunConfig bad = preset("disk-saddle");
  bad.surface = "klein-bottle";
  CHECK(run_command("index", bad).exit_code == 4);
  bad = preset("disk-saddle");
  bad.tol_zero = -1.0;
  CHECK(run_command("index", bad).exit_code == 4);
  CHECK(run_command("selftest", bad).exit_code == 4);
  bad = preset("disk-saddle");
  bad.field = "x +";
  CHECK(run_command("index", bad).exit_code == 4);
  CHECK(run_command("frobnicate", preset("disk-saddle")).exit_code == 4);
  RunConfig lf = preset("torus-half-turn");
  lf.surface = "disk";
  CHECK(run_command("linefield", lf).exit_code == 4);
  // A zero on the boundary cannot be certified.
  RunConfig edge;
  edge.field = "x - 1, y, 0";
  CHECK(run_command("index", edge).exit_code == 3);
}

TEST_CASE("output directory") {
  const auto dir = temp_dir("out");
  RunConfig c = preset("disk-saddle");
  c.out = dir.string();
  const RunReport r = run_command("index", c);
  REQUIRE(r.exit_code == 0);
  const RunReport back = read_report((dir / "report.json").string());
  CHECK(equal_modulo_timing(back, r));
  std::ifstream csv(dir / "field.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "chart,u,v,w1,w2,w3");
}

TEST_CASE("vmo-index and linefield commands") {
  const RunReport v = run_command("vmo-index", preset("vmo-torus"));
  REQUIRE(v.exit_code == 0);
  CHECK(v.results["certified"] == true);
  CHECK(v.results["index"]["ind"] == 0);

  const RunReport half = run_command("linefield", preset("torus-half-turn"));
  REQUIRE(half.exit_code == 0);
  CHECK(half.results["orientable"] == false);
  CHECK(half.results["holonomy"][1]["sign"] == -1);
  CHECK(half.results["singularities"]["index_sum"] == 0.0);
  CHECK(half.results["verdict"]["verdict"] == "certified");

  const RunReport sphere = run_command("linefield", preset("linefield-sphere"));
  REQUIRE(sphere.exit_code == 0);
  CHECK(sphere.results["singularities"]["index_sum"] == 2.0);
  CHECK(sphere.results["verdict"]["verdict"] == "obstructed");
}

TEST_CASE("corrupted tolerances fail the acceptance check") {
  AcceptanceOptions good;
  good.only = {1};
  CHECK(run_acceptance(good).at(0).pass);
  AcceptanceOptions bad = good;
  bad.roots.zero_tol = 10.0;
  CHECK_FALSE(run_acceptance(bad).at(0).pass);
  CHECK(format_criterion(run_acceptance(good).at(0)).rfind("PASS  1 ", 0) == 0);
}
