#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rtlforge::util {

struct RunResult {
    bool spawned = false;        // false: the command could not be launched at all
    bool timed_out = false;
    int exit_code = -1;          // valid when spawned && !timed_out
    std::string out;
    std::string err;
    std::string spawn_error;
};

struct RunOptions {
    std::optional<std::filesystem::path> cwd;
    std::chrono::milliseconds timeout{0};  // 0 = no timeout
    std::size_t max_output_bytes = 16 * 1024 * 1024;
};

// fork/exec with stdout+stderr capture; on timeout the whole process group is
// killed. argv[0] is resolved via PATH.
RunResult run_command(const std::vector<std::string>& argv, const RunOptions& options = {});

}  // namespace rtlforge::util
