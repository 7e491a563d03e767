#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rag::cli {

// Runs the command line given argv-style arguments (without the program
// name).  Returns the process exit code: 0 ok, 2 validation, 3
// infeasible/degenerate, 4 resource limit.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rag::cli
