#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bqk::cli {

enum ExitCode : int { ok = 0, input = 2, invariant = 3, solver = 4, verify_failed = 5 };

// Runs one command line (without the program name). Results go to `out`
// unless --out is given; diagnostics go to `err`. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bqk::cli
