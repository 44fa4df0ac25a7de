#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace plantsim::cli {

// args excludes the program name. Exit codes: 0 success, 1 runtime error,
// 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace plantsim::cli
