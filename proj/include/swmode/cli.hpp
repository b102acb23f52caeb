#pragma once

#include <string>
#include <vector>

namespace swmode {

/// CLI entry point. Exit codes: 0 success, 2 configuration error,
/// 3 numerical failure.
int run_cli(const std::vector<std::string>& args);

}  // namespace swmode
