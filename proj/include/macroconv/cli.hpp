#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace macroconv::cli {

/// Exit codes: 0 success, 1 runtime failure, 2 usage or parameter error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace macroconv::cli
