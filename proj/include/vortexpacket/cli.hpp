#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace vortex {

// Top-level command dispatcher. `args` excludes the program name.
// Exit codes: 0 success, 1 domain error, 2 usage error.
int dispatch(const std::vector<std::string>& args);

// Invariant battery behind the `selftest` subcommand; returns the number of
// failed checks and prints one line per check.
int run_selftest(std::ostream& out);

}  // namespace vortex
