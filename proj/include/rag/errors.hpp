#pragma once

#include <stdexcept>
#include <string>

namespace rag {

// Invalid inputs: malformed tables, broken game invariants, out-of-range
// parameters.  CLI exit code 2.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Well-formed inputs for which the requested quantity does not exist:
// infeasible/unbounded programs, zero-curvature decompositions,
// below-threshold trade-off targets.  CLI exit code 3.
struct InfeasibleError : std::runtime_error {
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// Instance too large for exhaustive enumeration.  CLI exit code 4.
struct ResourceLimitError : std::runtime_error {
  explicit ResourceLimitError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical breakdown distinguishable from infeasibility (failed pivot,
// failed duality certificate).  CLI exit code 3.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rag
