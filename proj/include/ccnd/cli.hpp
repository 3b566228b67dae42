#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ccnd::cli {

// Entry point behind the ccnd binary; split out so tests can drive it.
// Subcommands: solve, bench, generate, validate, oracle. Returns the process
// exit code: 0 success/Optimal, 2 time limit, 1 anything else.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace ccnd::cli
