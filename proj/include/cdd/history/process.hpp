#pragma once

#include <optional>
#include <string>
#include <vector>

namespace cdd::history {

struct ProcessResult {
    int exit_code = -1;
    std::string out;
    std::string err;
    /// The executable could not be started at all.
    bool not_found = false;
};

/// Runs argv[0] (looked up on PATH) with `input` fed to stdin while stdout
/// and stderr are drained, so large batch exchanges cannot deadlock.
ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input = {},
                          const std::optional<std::string>& cwd = std::nullopt);

} // namespace cdd::history
