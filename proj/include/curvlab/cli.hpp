#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace curvlab {

/// Entry point of the curvature-lab tool. `args` excludes the program name.
/// Returns 0 when every requested check passes, 1 on numerical failure and
/// 2 on usage or configuration errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace curvlab
