#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace isokernel::cli {

/// Runs one command; `args` excludes the program name. Exit status 0 on
/// success, 2 on invalid input, 1 on numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace isokernel::cli
