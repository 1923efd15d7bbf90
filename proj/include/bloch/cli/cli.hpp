#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bloch::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUsage = 1,
    kValidation = 2,
    kNumerical = 3,
    kPhysicalValidity = 4,
};

// Runs `bloch <args...>`; args excludes the program name. Results go to `out` unless
// --out is given; diagnostics go to `err` only.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace bloch::cli
