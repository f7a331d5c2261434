#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fblv::cli {

enum ExitCode : int {
    kOk = 0,
    kNumericFailure = 2,
    kConfigError = 3,
    kNoResult = 4,
};

/// Entry point of the `fblv` tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fblv::cli
