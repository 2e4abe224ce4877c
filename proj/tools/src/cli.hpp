#pragma once

#include <ostream>

namespace zatlas::cli {

enum ExitCode : int { kOk = 0, kVerificationFailure = 1, kConfigError = 2, kComputeError = 3 };

/// Entry point of the zatlas tool, with the streams injected for tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace zatlas::cli
