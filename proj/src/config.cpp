#include "vmoidx/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "vmoidx/error.hpp"

namespace vmoidx {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  const auto b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::ConfigError, key + ": expected a number, got '" + text + "'");
}

long long to_integer(const std::string& key, const std::string& text) {
  long long v = 0;
  const std::string t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size())
    fail(ErrorCode::ConfigError, key + ": expected an integer, got '" + text + "'");
  return v;
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "surface") c.surface = value;
  else if (key == "field") c.field = value;
  else if (key == "datum") c.datum = value;
  else if (key == "preset") c.preset = value;
  else if (key == "out") c.out = value;
  else if (key == "seed") {
    const long long s = to_integer(key, value);
    if (s < 0) fail(ErrorCode::ConfigError, "seed must be nonnegative");
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "tol-zero") c.tol_zero = to_double(key, value);
  else if (key == "tol-jac") c.tol_jac = to_double(key, value);
  else if (key == "c1") c.c1 = to_double(key, value);
  else if (key == "c2") c.c2 = to_double(key, value);
  else if (key == "grid") c.grid = static_cast<int>(to_integer(key, value));
  else if (key == "scan") c.scan = static_cast<int>(to_integer(key, value));
  else if (key == "eps-grid") {
    c.eps_grid.clear();
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) {
      if (!trim(item).empty()) c.eps_grid.push_back(to_double(key, item));
    }
  } else {
    fail(ErrorCode::ConfigError, "unknown config key '" + key + "'");
  }
}

RunConfig config_from_text(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
    set_config_value(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "cannot read config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_text(buf.str());
}

std::string config_to_text(const RunConfig& c) {
  std::ostringstream out;
  if (!c.surface.empty()) out << "surface = " << c.surface << '\n';
  if (!c.field.empty()) out << "field = " << c.field << '\n';
  if (!c.datum.empty()) out << "datum = " << c.datum << '\n';
  if (!c.preset.empty()) out << "preset = " << c.preset << '\n';
  if (!c.eps_grid.empty()) {
    out << "eps-grid = ";
    for (std::size_t i = 0; i < c.eps_grid.size(); ++i) out << (i ? ", " : "") << format_double(c.eps_grid[i]);
    out << '\n';
  }
  out << "seed = " << c.seed << '\n';
  out << "tol-zero = " << format_double(c.tol_zero) << '\n';
  out << "tol-jac = " << format_double(c.tol_jac) << '\n';
  out << "grid = " << c.grid << '\n';
  if (c.c1 > 0) out << "c1 = " << format_double(c.c1) << '\n';
  if (c.c2 > 0) out << "c2 = " << format_double(c.c2) << '\n';
  out << "scan = " << c.scan << '\n';
  if (!c.out.empty()) out << "out = " << c.out << '\n';
  return out.str();
}

void validate_config(const RunConfig& c, double r0) {
  if (!(c.tol_zero > 0) || !(c.tol_jac > 0)) fail(ErrorCode::ConfigError, "tolerances must be positive");
  if (c.grid < 4) fail(ErrorCode::ConfigError, "grid must be at least 4");
  if (c.scan < 4) fail(ErrorCode::ConfigError, "scan must be at least 4");
  if (c.c1 < 0 || c.c2 < 0 || (c.c1 > 0 && c.c2 > 0 && c.c2 < c.c1))
    fail(ErrorCode::ConfigError, "bounds need 0 < c1 <= c2");
  for (std::size_t i = 0; i < c.eps_grid.size(); ++i) {
    const double e = c.eps_grid[i];
    if (!(e > 0) || e > r0 * (1 + 1e-12))
      fail(ErrorCode::ConfigError, "eps " + format_double(e) + " outside (0, r0 = " + format_double(r0) + "]");
    if (i > 0 && !(e < c.eps_grid[i - 1])) fail(ErrorCode::ConfigError, "eps-grid must be strictly decreasing");
  }
}

RootSearchOptions root_options(const RunConfig& c) {
  RootSearchOptions r;
  r.zero_tol = c.tol_zero;
  r.jac_tol = c.tol_jac;
  r.grid = c.grid;
  return r;
}

}  // namespace vmoidx
