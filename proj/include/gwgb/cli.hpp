#pragma once

#include <ostream>

namespace gwgb::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsageError = 2,
    kDataError = 3,
    kModelError = 4,
};

// Entry point of the `gwgb` tool; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gwgb::cli
