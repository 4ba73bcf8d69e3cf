#pragma once

#include <string>
#include <vector>

namespace papermatch {

// Entry point behind the papermatch binary; also callable in-process by
// tests. Returns the process exit code.
int run_cli(const std::vector<std::string>& args);

}  // namespace papermatch
