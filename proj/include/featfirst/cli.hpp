#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace featfirst::cli {

/// Process exit codes of the `featfirst` tool.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kIo = 2,
  kParse = 3,
  kInvalidGrammar = 4,
  kLimitExceeded = 5,
  kUnknownCategory = 6,
  kModeMismatch = 7,
};

/// Runs the tool on `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace featfirst::cli
