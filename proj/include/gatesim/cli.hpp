#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gatesim::cli {

enum ExitCode : int {
    kSuccess = 0,
    kValidationError = 1,
    kRuntimeError = 2,
};

// Entry point shared by the gatesim binary and the tests. `args` excludes the
// program name. Commands: gen-trace, enroll, run, compare, eval.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gatesim::cli
