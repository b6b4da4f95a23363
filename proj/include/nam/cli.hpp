#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nam {

/// Command-line front end. `args` excludes the program name. Returns the
/// exit code: 0 safe (or empty), 1 unsafe (or nonempty), 2 error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace nam
