#pragma once

#include <string>
#include <vector>

namespace metafair::cli {

/// Runs one CLI invocation. `args` excludes the program name. Returns the
/// process exit status: 0 success, 1 runtime failure, 2 usage error.
int dispatch(const std::vector<std::string>& args);

}  // namespace metafair::cli
