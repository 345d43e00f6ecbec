#pragma once

#include <ostream>

namespace genlie::cli {

// Exit codes: 0 all verdicts pass, 1 some verdict fails, 2 invalid input,
// 3 computation error. Errors are written to `err` as one JSON object.
enum ExitCode { Pass = 0, VerdictFailure = 1, InputFailure = 2, ComputationFailure = 3 };

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace genlie::cli
