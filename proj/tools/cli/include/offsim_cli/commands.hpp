// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace offsim::cli {

/// Process exit statuses.
enum ExitStatus : int {
  kOk = 0,
  kBadArguments = 2,
  kProfileError = 3,
  kIoError = 4,
  kInfeasible = 5,
  kNetworkError = 6,
};

/// Runs the command line (without the program name). Results go to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace offsim::cli
