#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mutforge {

struct ExecResult {
  bool started = false;  // false: the command could not be executed at all
  int exit_code = 0;     // meaningful when started and not signal-terminated
  std::optional<int> term_signal;
  bool timed_out = false;
  std::string output;  // merged stdout+stderr, first 64 KiB retained
  double duration_seconds = 0.0;
};

// Runs argv in its own process group under cwd; on timeout the whole group is
// killed. env_overrides are applied on top of the inherited environment.
ExecResult run_command(const std::vector<std::string>& argv, const std::string& cwd,
                       const std::map<std::string, std::string>& env_overrides,
                       double timeout_seconds);

// "SIGSEGV" style name for common signals, "SIG<n>" otherwise.
std::string signal_name(int sig);

}  // namespace mutforge
