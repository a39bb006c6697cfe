#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "vmoidx/commands.hpp"
#include "vmoidx/presets.hpp"

using namespace vmoidx;

int main(int argc, char** argv) {
  CLI::App app{"Indices of vector fields and line fields on surfaces"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  static const std::pair<const char*, const char*> keys[] = {
      {"surface", "catalog name (disk, annulus, sphere, torus) or surface config file"},
      {"field", "ambient components 'f1, f2, f3' or chart components 'a, b', or a sampled CSV"},
      {"datum", "boundary datum over x, y, z and theta"},
      {"eps-grid", "comma-separated decreasing mollification radii"},
      {"seed", "seed for random perturbations"},
      {"tol-zero", "residual below which a point counts as a zero"},
      {"tol-jac", "Jacobian determinant below which a zero is degenerate"},
      {"out", "directory for report.json and CSV samples"},
      {"preset", "named input, see --list-presets"},
      {"c1", "lower norm bound for extend (default: from the datum)"},
      {"c2", "upper norm bound for extend (default: from the datum)"},
      {"grid", "root search grid per chart axis"},
      {"scan", "norm scan resolution for extend"},
  };
  std::map<std::string, std::string> values;
  for (const auto& [key, help] : keys) app.add_option(std::string("--") + key, values[key], help);
  std::string config_path;
  app.add_option("--config", config_path, "key = value file; flags override it");
  bool list_presets = false;
  app.add_flag("--list-presets", list_presets, "print the preset catalog and exit");

  const std::map<std::string, std::string> commands = {
      {"index", "index, inward index and Morse residual of a continuous field"},
      {"vmo-index", "index data of a mollified field over an eps grid"},
      {"extend", "nowhere-vanishing extension of a boundary datum"},
      {"linefield", "holonomy, singularities and verdict for a line field"},
      {"selftest", "run the acceptance suite"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  CLI11_PARSE(app, argc, argv);

  if (list_presets) {
    for (const auto& p : preset_catalog()) {
      std::cout << p.name << " (" << p.command << ", " << p.surface << "): " << p.description << "\n";
    }
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return 4;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    for (const auto& [key, help] : keys) {
      if (app.count(std::string("--") + key) > 0) set_config_value(cfg, key, values[key]);
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code_for(e.code());
  }

  const RunReport report = run_command(command, cfg);
  std::cout << dump_report(report);
  if (report.exit_code != 0) std::cerr << report.error_message << "\n";
  return report.exit_code;
}
