#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rrg::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericFailure = 3, kAcceptanceFailure = 4 };

// Parses the arguments (without the program name), runs one subcommand and returns its exit code.
// Errors are reported as one JSON object on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_main(int argc, char** argv);

}  // namespace rrg::cli
