#include "saferust/process.hpp"

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <fstream>
#include <sstream>
#include <system_error>

extern char** environ;

namespace saferust {

namespace {

class SpawnActions {
 public:
  SpawnActions() { posix_spawn_file_actions_init(&actions_); }
  ~SpawnActions() { posix_spawn_file_actions_destroy(&actions_); }
  SpawnActions(const SpawnActions&) = delete;
  SpawnActions& operator=(const SpawnActions&) = delete;
  posix_spawn_file_actions_t* get() { return &actions_; }

 private:
  posix_spawn_file_actions_t actions_;
};

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv, const std::filesystem::path& cwd) {
  if (argv.empty()) throw std::invalid_argument("run_process: empty argv");

  // Output goes to a file rather than a pipe so a chatty child cannot block.
  static std::atomic<unsigned> counter{0};
  const std::filesystem::path capture =
      cwd / (".process_output." + std::to_string(::getpid()) + "." + std::to_string(counter++));
  const int fd = ::open(capture.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw std::system_error(errno, std::generic_category(), capture.string());

  SpawnActions actions;
  posix_spawn_file_actions_adddup2(actions.get(), fd, STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(actions.get(), fd, STDERR_FILENO);
  posix_spawn_file_actions_addchdir_np(actions.get(), cwd.c_str());

  std::vector<char*> args;
  args.reserve(argv.size() + 1);
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  pid_t pid = 0;
  const int rc = posix_spawnp(&pid, args[0], actions.get(), nullptr, args.data(), environ);
  ::close(fd);
  if (rc != 0) {
    std::filesystem::remove(capture);
    throw std::system_error(rc, std::generic_category(), "spawn " + argv[0]);
  }

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) throw std::system_error(errno, std::generic_category(), "waitpid");
  }

  ProcessResult result;
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.exit_code = 128 + WTERMSIG(status);
  }
  {
    std::ifstream in(capture, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    result.output = buf.str();
  }
  std::filesystem::remove(capture);
  // posix_spawnp reports a missing program as exit 127 on some libcs.
  if (result.exit_code == 127 && result.output.empty()) {
    throw std::system_error(ENOENT, std::generic_category(), "spawn " + argv[0]);
  }
  return result;
}

}  // namespace saferust
