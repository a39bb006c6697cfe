#include "vmoidx/report.hpp"

#include <fstream>
#include <sstream>

#include "vmoidx/error.hpp"

namespace vmoidx {

Json to_json(const RunReport& r) {
  Json j;
  j["command"] = r.command;
  j["tool_version"] = r.tool_version;
  j["config"] = r.config;
  j["results"] = r.results;
  j["exit_code"] = r.exit_code;
  j["error_code"] = r.error_code;
  j["error_message"] = r.error_message;
  j["timing"] = Json{{"seconds", r.seconds}};
  return j;
}

RunReport report_from_json(const Json& j) {
  RunReport r;
  try {
    r.command = j.at("command").get<std::string>();
    r.tool_version = j.at("tool_version").get<std::string>();
    r.config = j.at("config");
    r.results = j.at("results");
    r.exit_code = j.at("exit_code").get<int>();
    r.error_code = j.at("error_code").get<std::string>();
    r.error_message = j.at("error_message").get<std::string>();
    r.seconds = j.at("timing").at("seconds").get<double>();
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, std::string("malformed report: ") + e.what());
  }
  return r;
}

std::string dump_report(const RunReport& r) { return to_json(r).dump(2) + "\n"; }

void write_report(const std::string& path, const RunReport& r) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::ConfigError, "cannot write '" + path + "'");
  out << dump_report(r);
}

RunReport read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "cannot read '" + path + "'");
  try {
    return report_from_json(Json::parse(in));
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::ParseError, std::string("report is not JSON: ") + e.what());
  }
}

bool equal_modulo_timing(const RunReport& a, const RunReport& b) {
  Json ja = to_json(a), jb = to_json(b);
  ja.erase("timing");
  jb.erase("timing");
  // Per-criterion timings in selftest reports.
  for (Json* j : {&ja, &jb}) {
    if (auto it = j->find("results"); it != j->end() && it->contains("criteria")) {
      for (auto& c : (*it)["criteria"]) c.erase("seconds");
    }
  }
  return ja == jb;
}

Json config_json(const RunConfig& c) {
  Json j;
  j["surface"] = c.surface;
  j["field"] = c.field;
  j["datum"] = c.datum;
  j["preset"] = c.preset;
  j["eps_grid"] = c.eps_grid;
  j["seed"] = c.seed;
  j["tol_zero"] = c.tol_zero;
  j["tol_jac"] = c.tol_jac;
  j["grid"] = c.grid;
  j["c1"] = c.c1;
  j["c2"] = c.c2;
  j["scan"] = c.scan;
  j["out"] = c.out;
  return j;
}

Json point_json(const SurfacePoint& p) {
  return Json{{"chart", p.chart},
              {"uv", {p.uv.x(), p.uv.y()}},
              {"position", {p.position.x(), p.position.y(), p.position.z()}}};
}

Json zero_json(const Zero& z) {
  Json j = point_json(z.location);
  j["sign"] = z.sign;
  j["nondegenerate"] = z.nondegenerate;
  j["jacobian_det"] = z.chart_jacobian.determinant();
  return j;
}

Json index_report_json(const IndexReport& r) {
  Json j;
  j["chi"] = r.chi;
  j["ind"] = r.ind;
  j["ind_minus"] = r.ind_minus;
  j["morse_residual"] = r.morse_residual;
  j["epsilon1"] = r.epsilon1;
  j["zeros"] = Json::array();
  for (const auto& z : r.zeros) j["zeros"].push_back(zero_json(z));
  j["diagnostics"] = r.diagnostics;
  return j;
}

}  // namespace vmoidx
