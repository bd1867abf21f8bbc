#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace symdx {

/// Runs the command line tool. `args` excludes the program name.
/// Returns 0 on success, 1 for usage errors, 2 for data errors, 3 for numerical failures.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace symdx
