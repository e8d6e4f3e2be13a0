#pragma once

#include <string>
#include <vector>

namespace dfs {

// Runs the command-line surface; returns the process exit code. Errors are
// reported as a single "error: ..." line on stderr with a nonzero return.
int cli_run(const std::vector<std::string>& args);

}  // namespace dfs
