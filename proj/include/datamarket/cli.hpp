#pragma once

#include <iosfwd>

namespace datamarket {

// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // I/O and other unexpected runtime failures
  kExitParse = 2,
  kExitBudget = 3,
  kExitUnsupportedModel = 4,
  kExitInvariantBreach = 5,
};

// Entry point shared by the binary and the tests. Never throws.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace datamarket
