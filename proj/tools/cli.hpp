#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tracelab::cli {

/// Exit codes: 0 all checks pass, 1 a check or computation failed, 2 usage error.
enum ExitCode { kPass = 0, kCheckFailure = 1, kUsage = 2 };

/// Runs the driver on `args` (without the program name). Records go to
/// `out` unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tracelab::cli
