#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace contagion::cli {

enum ExitCode : int { ok = 0, config_error = 1, io_error = 2 };

/// Runs one command line (args excludes the program name). Normal output
/// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace contagion::cli
