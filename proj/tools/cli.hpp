#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tqsb::cli {

/// Runs the command line `args` (without the program name). Normal output
/// goes to `out` unless --output names a file; diagnostics go to `err`.
/// Returns 0 on success, 1 on invalid input, 2 when a solve did not converge.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace tqsb::cli
