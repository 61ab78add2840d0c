#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ragrules/config.hpp"

namespace ragrules {

enum ExitCode : int { kExitOk = 0, kExitAborted = 1, kExitConfig = 2 };

// Executes one workflow. The JSON report (or CSV for sweep) goes to
// config.output when set, otherwise to `out`. Diagnostics go to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Full command line, args[0] being the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

// "0b010", "0x2" or "2".
std::uint64_t parse_mask_literal(const std::string& text);

}  // namespace ragrules
