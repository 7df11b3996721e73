#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace valuegap {

// Runs the command line `args` (program name excluded). Returns the process
// exit code: 0 on success, 1 on usage or validation errors, 2 on runtime
// failures and failed verification checks.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace valuegap
