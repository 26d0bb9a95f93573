#pragma once

// Command-line front end. Exit codes: 0 success, 1 bad arguments, config or
// data, 2 numerical failure.

#include <iosfwd>
#include <string>
#include <vector>

namespace smootherlab {

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace smootherlab
