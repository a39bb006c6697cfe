#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vmoidx/roots.hpp"

namespace vmoidx {

// One run of the command-line tool. The key-value file format uses the long
// flag names as keys: surface, field, datum, eps-grid, seed, tol-zero,
// tol-jac, out, preset, c1, c2, scan, grid.
struct RunConfig {
  std::string surface;  // catalog name or path to a surface config; empty means disk
  std::string field;             // expression, or path to a sampled CSV
  std::string datum;             // boundary datum expression
  std::string preset;
  std::vector<double> eps_grid;  // empty: the surface default
  std::uint64_t seed = 1;
  double tol_zero = RootSearchOptions{}.zero_tol;
  double tol_jac = RootSearchOptions{}.jac_tol;
  int grid = RootSearchOptions{}.grid;
  double c1 = 0.0;  // 0: taken from the datum
  double c2 = 0.0;
  int scan = 128;   // norm scan resolution per chart axis
  std::string out;  // output directory; empty writes nothing
};

RunConfig config_from_text(const std::string& text);
RunConfig load_config(const std::string& path);
std::string config_to_text(const RunConfig& c);

// Sets one key; ConfigError on unknown keys or malformed values.
void set_config_value(RunConfig& c, const std::string& key, const std::string& value);

// ConfigError unless tolerances are positive and eps_grid is strictly
// decreasing inside (0, r0].
void validate_config(const RunConfig& c, double r0);

RootSearchOptions root_options(const RunConfig& c);

}  // namespace vmoidx
