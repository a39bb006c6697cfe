#pragma once

#include <string>

#include "json.hpp"
#include "vmoidx/config.hpp"
#include "vmoidx/index.hpp"

namespace vmoidx {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "1.0.0";

struct RunReport {
  std::string command;
  std::string tool_version = kToolVersion;
  Json config = Json::object();
  Json results = Json::object();
  int exit_code = 0;
  std::string error_code;  // empty on success
  std::string error_message;
  double seconds = 0.0;
};

Json to_json(const RunReport& r);
RunReport report_from_json(const Json& j);
std::string dump_report(const RunReport& r);
void write_report(const std::string& path, const RunReport& r);
RunReport read_report(const std::string& path);

// Reports agree once timing fields are dropped.
bool equal_modulo_timing(const RunReport& a, const RunReport& b);

Json config_json(const RunConfig& c);
Json point_json(const SurfacePoint& p);
Json zero_json(const Zero& z);
Json index_report_json(const IndexReport& r);

}  // namespace vmoidx
