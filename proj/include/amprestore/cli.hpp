#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace amprestore::cli {

enum ExitCode : int { ok = 0, usage_error = 1, data_error = 2, divergence = 3 };

/// Entry point for the `amprestore` tool. `args[0]` is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace amprestore::cli
