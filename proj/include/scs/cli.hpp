#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scs {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitUsage = 2 };

// args[0] is the program name. Subcommands: gen, select, detect, eval, fuse,
// report.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace scs
