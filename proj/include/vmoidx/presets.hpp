#pragma once

#include <string>
#include <vector>

#include "vmoidx/config.hpp"

namespace vmoidx {

// Named inputs for the command-line tool. Fields are expressions in the
// syntax of field_from_expression; line-field presets give a director.
struct Preset {
  std::string name;
  std::string command;  // index, vmo-index, extend or linefield
  std::string surface;
  std::string field;
  std::string datum;
  std::string description;
};

const std::vector<Preset>& preset_catalog();
const Preset& find_preset(const std::string& name);

// Fills surface, field and datum from c.preset where c leaves them empty.
RunConfig apply_preset(RunConfig c);

}  // namespace vmoidx
