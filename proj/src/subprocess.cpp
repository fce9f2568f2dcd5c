#include "mutforge/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <stdlib.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>

namespace mutforge {

namespace {

constexpr std::size_t kMaxOutputBytes = 64 * 1024;

}  // namespace

std::string signal_name(int sig) {
  switch (sig) {
    case SIGSEGV: return "SIGSEGV";
    case SIGABRT: return "SIGABRT";
    case SIGBUS: return "SIGBUS";
    case SIGILL: return "SIGILL";
    case SIGFPE: return "SIGFPE";
    case SIGKILL: return "SIGKILL";
    case SIGTERM: return "SIGTERM";
    case SIGINT: return "SIGINT";
    case SIGHUP: return "SIGHUP";
    case SIGPIPE: return "SIGPIPE";
    default: return "SIG" + std::to_string(sig);
  }
}

ExecResult run_command(const std::vector<std::string>& argv, const std::string& cwd,
                       const std::map<std::string, std::string>& env_overrides,
                       double timeout_seconds) {
  ExecResult result;
  if (argv.empty()) return result;

  int out_pipe[2];
  int err_pipe[2];  // exec-failure reporting channel, close-on-exec
  if (::pipe(out_pipe) != 0) return result;
  if (::pipe(err_pipe) != 0) {
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    return result;
  }
  ::fcntl(err_pipe[1], F_SETFD, FD_CLOEXEC);

  auto t0 = std::chrono::steady_clock::now();
  pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {out_pipe[0], out_pipe[1], err_pipe[0], err_pipe[1]}) ::close(fd);
    return result;
  }

  if (pid == 0) {
    ::setpgid(0, 0);
    ::close(out_pipe[0]);
    ::close(err_pipe[0]);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::dup2(out_pipe[1], STDERR_FILENO);
    ::close(out_pipe[1]);
    if (!cwd.empty() && ::chdir(cwd.c_str()) != 0) {
      int err = errno;
      (void)!::write(err_pipe[1], &err, sizeof(err));
      ::_exit(127);
    }
    for (const auto& [key, value] : env_overrides) {
      ::setenv(key.c_str(), value.c_str(), 1);
    }
    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (const std::string& arg : argv) cargv.push_back(const_cast<char*>(arg.c_str()));
    cargv.push_back(nullptr);
    ::execvp(cargv[0], cargv.data());
    int err = errno;
    (void)!::write(err_pipe[1], &err, sizeof(err));
    ::_exit(127);
  }

  ::setpgid(pid, pid);  // parent side of the race; harmless if the child won
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);

  // Empty read on the status channel means exec succeeded.
  int child_errno = 0;
  ssize_t status_n = ::read(err_pipe[0], &child_errno, sizeof(child_errno));
  ::close(err_pipe[0]);
  result.started = (status_n <= 0);

  auto deadline = t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                           std::chrono::duration<double>(timeout_seconds));
  bool killed = false;
  char buffer[4096];
  for (;;) {
    auto now = std::chrono::steady_clock::now();
    if (!killed && now >= deadline) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      result.timed_out = true;
      killed = true;
    }
    int wait_ms = 50;
    if (!killed) {
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now);
      wait_ms = static_cast<int>(std::min<long long>(std::max<long long>(left.count(), 0), 50));
    }
    struct pollfd pfd = {out_pipe[0], POLLIN, 0};
    int ready = ::poll(&pfd, 1, wait_ms);
    if (ready > 0) {
      ssize_t n = ::read(out_pipe[0], buffer, sizeof(buffer));
      if (n == 0) break;  // EOF: all writers gone
      if (n < 0) {
        if (errno == EINTR) continue;
        break;
      }
      if (result.output.size() < kMaxOutputBytes) {
        std::size_t keep =
            std::min<std::size_t>(static_cast<std::size_t>(n),
                                  kMaxOutputBytes - result.output.size());
        result.output.append(buffer, keep);
      }
    }
  }
  ::close(out_pipe[0]);

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  // Reap any process-group stragglers left behind on timeout.
  if (killed) {
    while (::waitpid(-pid, nullptr, WNOHANG) > 0) {
    }
  }

  result.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.term_signal = WTERMSIG(status);
  }
  return result;
}

}  // namespace mutforge
