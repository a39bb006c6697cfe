#pragma once

#include <string>

#include "vmoidx/config.hpp"
#include "vmoidx/error.hpp"
#include "vmoidx/geometry.hpp"
#include "vmoidx/report.hpp"

namespace vmoidx {

// 0 success, 2 topological obstruction, 3 numerical failure, 4 config error.
int exit_code_for(ErrorCode code);

// Catalog name or path to a surface config; empty means the disk.
Surface resolve_surface(const std::string& name);

RunReport cmd_index(const RunConfig& c);
RunReport cmd_vmo_index(const RunConfig& c);
RunReport cmd_extend(const RunConfig& c);
RunReport cmd_linefield(const RunConfig& c);
RunReport cmd_selftest(const RunConfig& c);

// Applies the preset, runs the command and folds any failure into the
// report's exit code; writes report.json when c.out is set. Never throws.
RunReport run_command(const std::string& command, const RunConfig& c);

}  // namespace vmoidx
