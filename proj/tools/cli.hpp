#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace retire::cli {

enum Exit { kOk = 0, kUsage = 2, kSolver = 3, kVerify = 4 };

/// Whole command line in, exit status out. Output files go to --out when given.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience for tests: argv[0] is supplied.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace retire::cli
