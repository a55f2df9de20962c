#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bansim {

/// Entry point behind the `bansim` executable. `args` excludes the program
/// name. Returns the process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bansim
