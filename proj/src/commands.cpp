#include "vmoidx/commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>

#include "vmoidx/acceptance.hpp"
#include "vmoidx/extension.hpp"
#include "vmoidx/presets.hpp"
#include "vmoidx/qtensor.hpp"
#include "vmoidx/vmo.hpp"

namespace vmoidx {
namespace {

constexpr int kFieldCsvGrid = 64;

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

TangentField resolve_field(const Surface& s, const std::string& text) {
  if (text.empty()) fail(ErrorCode::ConfigError, "no field given");
  if (ends_with(text, ".csv")) return load_sampled_field(s, text);
  return field_from_expression(s, text);
}

IndexOptions index_options(const RunConfig& c) {
  IndexOptions io;
  io.search.roots = root_options(c);
  io.seeds = {c.seed, c.seed + 1, c.seed + 2};
  return io;
}

std::vector<double> eps_grid(const RunConfig& c, const Surface& s) {
  return c.eps_grid.empty() ? default_eps_grid(s) : c.eps_grid;
}

// Opens c.out/name for writing, creating the directory; nullopt when c.out is empty.
std::optional<std::ofstream> output_file(const RunConfig& c, const std::string& name, Json& results) {
  if (c.out.empty()) return std::nullopt;
  std::filesystem::create_directories(c.out);
  const std::string path = (std::filesystem::path(c.out) / name).string();
  std::ofstream f(path);
  if (!f) fail(ErrorCode::ConfigError, "cannot write '" + path + "'");
  results["files"].push_back(name);
  return f;
}

RunReport start(const std::string& command, const RunConfig& c) {
  RunReport r;
  r.command = command;
  r.config = config_json(c);
  return r;
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (classify(code)) {
    case ErrorClass::Obstruction:
      return 2;
    case ErrorClass::Numerical:
      return 3;
    case ErrorClass::Config:
      return 4;
  }
  return 3;
}

Surface resolve_surface(const std::string& name) {
  if (name.empty()) return make_disk();
  for (const auto& n : catalog_names()) {
    if (n == name) return catalog_surface(name);
  }
  if (std::filesystem::exists(name)) return load_surface_config(name);
  fail(ErrorCode::ConfigError, "unknown surface '" + name + "'");
}

RunReport cmd_index(const RunConfig& c) {
  RunReport r = start("index", c);
  const Surface s = resolve_surface(c.surface);
  validate_config(c, s.r0());
  const TangentField v = resolve_field(s, c.field);
  const IndexReport rep = morse_check(s, v, index_options(c));
  r.results["surface"] = s.name();
  r.results["index"] = index_report_json(rep);
  if (auto f = output_file(c, "field.csv", r.results)) write_field_csv(*f, s, v, kFieldCsvGrid);
  return r;
}

RunReport cmd_vmo_index(const RunConfig& c) {
  RunReport r = start("vmo-index", c);
  const Surface s = resolve_surface(c.surface);
  validate_config(c, s.r0());
  const TangentField v = resolve_field(s, c.field);
  const std::vector<double> grid = eps_grid(c, s);
  VmoOptions vo;
  vo.index = index_options(c);
  const VmoField f = vmo_field(s, v);
  const VmoIndexResult res = vmo_index(s, f, grid, vo);
  r.results["surface"] = s.name();
  r.results["certified"] = res.certified;
  r.results["entries"] = Json::array();
  for (const auto& e : res.entries) {
    r.results["entries"].push_back(
        Json{{"eps", e.eps}, {"ind", e.ind}, {"ind_minus", e.ind_minus}, {"residual", e.residual}});
  }
  r.results["index"] = index_report_json(res.report);
  if (auto out = output_file(c, "diagnostics.csv", r.results)) {
    write_diagnostics_csv(*out, vmo_diagnostics(s, f, grid, vo));
  }
  return r;
}

RunReport cmd_extend(const RunConfig& c) {
  RunReport r = start("extend", c);
  const Surface s = resolve_surface(c.surface);
  validate_config(c, s.r0());
  if (c.datum.empty()) fail(ErrorCode::ConfigError, "no datum given");
  const BoundaryDatum g = datum_from_expression(s, c.datum);
  const NormRange range = datum_norm_range(s, g);
  const double c1 = c.c1 > 0 ? c.c1 : range.min;
  const double c2 = c.c2 > 0 ? c.c2 : range.max;
  ExtensionOptions eo;
  eo.index = index_options(c);
  eo.seed = c.seed;
  r.results["surface"] = s.name();
  r.results["c1"] = c1;
  r.results["c2"] = c2;
  const ExtensionResult ext = extend_boundary_datum(s, g, c1, c2, eo);
  const ScanResult scan = norm_scan(s, ext.field, c.scan);
  const IndexReport rep = morse_check(s, ext.field, eo.index);
  r.results["chi"] = ext.chi;
  r.results["ind_minus"] = ext.ind_minus_g;
  r.results["r"] = ext.r;
  r.results["certificates"] = ext.certificates;
  r.results["scan"] = Json{{"n", c.scan}, {"min_norm", scan.min_norm}, {"max_norm", scan.max_norm}};
  r.results["index"] = index_report_json(rep);
  if (auto f = output_file(c, "extended_field.csv", r.results)) write_field_csv(*f, s, ext.field, kFieldCsvGrid);
  return r;
}

RunReport cmd_linefield(const RunConfig& c) {
  RunReport r = start("linefield", c);
  const Surface s = resolve_surface(c.surface);
  validate_config(c, s.r0());
  if (!s.closed()) fail(ErrorCode::Unsupported, "line fields are supported on closed surfaces only");
  const TangentField director = resolve_field(s, c.field);
  const QField q = q_field(line_field_from_vector(director));
  const std::vector<Loop> loops = generating_loops(s);
  const Holonomy h = orientability_check(s, q, loops);
  r.results["surface"] = s.name();
  r.results["chi"] = s.euler_characteristic();
  r.results["holonomy"] = Json::array();
  for (std::size_t k = 0; k < loops.size(); ++k) {
    r.results["holonomy"].push_back(Json{{"loop", loops[k].name}, {"sign", h.signs[k]}});
  }
  r.results["orientable"] = h.orientable;

  LineFieldVerdictOptions vo;
  vo.eps_grid = eps_grid(c, s);
  const LineFieldVerdict verdict = vmo_linefield_obstruction(s, q, vo);
  Json entries = Json::array();
  for (const auto& e : verdict.entries) {
    entries.push_back(Json{{"eps", e.eps}, {"min_norm", e.min_norm}, {"max_norm", e.max_norm}, {"within", e.within}});
  }
  r.results["verdict"] = Json{{"verdict", verdict.verdict}, {"c1", verdict.c1},     {"c2", verdict.c2},
                              {"bounds_hold", verdict.bounds_hold}, {"certified", verdict.certified},
                              {"entries", entries}};

  // vv^T - |v|^2 P / 2 carries the same lines, is continuous across sign
  // flips of the director and vanishes exactly where the director does.
  const auto sing = linefield_singularities(s, q_field_from_vector(director), root_options(c));
  Json list = Json::array();
  double total = 0.0;
  for (const auto& p : sing) {
    Json j = point_json(p.location);
    j["index"] = p.index;
    list.push_back(j);
    total += p.index;
  }
  r.results["singularities"] = Json{{"points", list},
                                    {"index_sum", total},
                                    {"matches_chi", total == s.euler_characteristic()}};
  if (auto f = output_file(c, "q_field.csv", r.results)) write_q_csv(*f, s, q, kFieldCsvGrid);
  return r;
}

RunReport cmd_selftest(const RunConfig& c) {
  RunReport r = start("selftest", c);
  validate_config(c, make_disk().r0());
  AcceptanceOptions ao;
  ao.roots = root_options(c);
  ao.seed = c.seed;
  const auto results = run_acceptance(ao);
  int passed = 0;
  r.results["criteria"] = Json::array();
  for (const auto& cr : results) {
    passed += cr.pass;
    r.results["criteria"].push_back(
        Json{{"id", cr.id}, {"name", cr.name}, {"pass", cr.pass}, {"detail", cr.detail}, {"seconds", cr.seconds}});
  }
  r.results["passed"] = passed;
  r.results["total"] = results.size();
  if (passed != static_cast<int>(results.size())) {
    r.exit_code = 3;
    r.error_code = "AcceptanceFailed";
    r.error_message = std::to_string(results.size() - static_cast<std::size_t>(passed)) + " criteria failed";
  }
  return r;
}

RunReport run_command(const std::string& command, const RunConfig& cin) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport r;
  r.command = command;
  RunConfig c = cin;
  try {
    c = apply_preset(cin);
    if (command == "index") r = cmd_index(c);
    else if (command == "vmo-index") r = cmd_vmo_index(c);
    else if (command == "extend") r = cmd_extend(c);
    else if (command == "linefield") r = cmd_linefield(c);
    else if (command == "selftest") r = cmd_selftest(c);
    else fail(ErrorCode::ConfigError, "unknown command '" + command + "'");
  } catch (const Error& e) {
    r.command = command;
    r.config = config_json(c);
    r.exit_code = exit_code_for(e.code());
    r.error_code = to_string(e.code());
    r.error_message = e.what();
    if (const auto* t = dynamic_cast<const TopologicalObstruction*>(&e)) {
      r.results["chi"] = t->euler_characteristic();
      r.results["ind_minus"] = t->inward_index();
    }
  } catch (const std::exception& e) {
    r.command = command;
    r.config = config_json(c);
    r.exit_code = 3;
    r.error_code = "InternalError";
    r.error_message = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!c.out.empty()) {
    try {
      std::filesystem::create_directories(c.out);
      write_report((std::filesystem::path(c.out) / "report.json").string(), r);
    } catch (const std::exception& e) {
      if (r.exit_code == 0) {
        r.exit_code = 4;
        r.error_code = to_string(ErrorCode::ConfigError);
        r.error_message = e.what();
      }
    }
  }
  return r;
}

}  // namespace vmoidx
