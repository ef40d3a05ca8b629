#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace poalab::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kSolverFailure = 2,
  kVerificationFailure = 3,
};

// Runs one CLI invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace poalab::cli
