#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace saferust {

struct ProcessResult {
  int exit_code = 0;
  // stdout and stderr, interleaved in write order.
  std::string output;
};

// Runs argv[0] (looked up on PATH) inside `cwd` and waits for it. Throws
// std::system_error when the program cannot be started; ENOENT means it was
// not found.
ProcessResult run_process(const std::vector<std::string>& argv, const std::filesystem::path& cwd);

}  // namespace saferust
