#pragma once

// Command-line front end: verify, classify, brackets, reduce, figures.

#include <iosfwd>
#include <string>
#include <vector>

namespace liesym::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kVerificationFailed = 2, kNumericFailure = 3 };

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace liesym::cli
