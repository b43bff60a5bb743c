#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <mutex>
#include <string>

#include "latentpara/errors.hpp"
#include "latentpara/protocol.hpp"

namespace latentpara {

namespace {

class SubprocessTransport : public Transport {
 public:
  SubprocessTransport(const std::string& command, int timeout_ms) : timeout_ms_(timeout_ms) {
    static std::once_flag ignore_sigpipe;
    std::call_once(ignore_sigpipe, [] { ::signal(SIGPIPE, SIG_IGN); });

    int to_child[2];
    int from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0) throw TransportError("pipe: " + std::string(std::strerror(errno)));
    if (::pipe2(from_child, O_CLOEXEC) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw TransportError("pipe: " + std::string(std::strerror(errno)));
    }
    pid_ = ::fork();
    if (pid_ < 0) {
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
      throw TransportError("fork: " + std::string(std::strerror(errno)));
    }
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    write_fd_ = to_child[1];
    read_fd_ = from_child[0];
    command_ = command;
  }

  ~SubprocessTransport() override {
    if (write_fd_ >= 0) ::close(write_fd_);
    if (read_fd_ >= 0) ::close(read_fd_);
    if (pid_ > 0) {
      // Give the child a moment to exit on EOF before killing it.
      for (int i = 0; i < 50; ++i) {
        if (::waitpid(pid_, nullptr, WNOHANG) == pid_) return;
        ::usleep(10000);
      }
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, nullptr, 0);
    }
  }

  std::string exchange(const std::string& line) override {
    std::lock_guard lock(mutex_);
    if (broken_) throw TransportError("oracle process '" + command_ + "' is no longer usable");
    write_all(line + "\n");
    return read_line();
  }

 private:
  void write_all(const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
      const ssize_t n = ::write(write_fd_, data.data() + off, data.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        broken_ = true;
        throw TransportError("write to oracle process failed: " + std::string(std::strerror(errno)));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::string read_line() {
    using clock = std::chrono::steady_clock;
    const auto deadline = clock::now() + std::chrono::milliseconds(timeout_ms_);
    while (true) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      const auto remaining =
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now()).count();
      if (remaining <= 0) {
        // The stream is now out of step with our requests.
        broken_ = true;
        throw TimeoutError("oracle process '" + command_ + "' did not answer within " +
                           std::to_string(timeout_ms_) + " ms");
      }
      pollfd pfd{read_fd_, POLLIN, 0};
      const int rc = ::poll(&pfd, 1, static_cast<int>(remaining));
      if (rc < 0) {
        if (errno == EINTR) continue;
        broken_ = true;
        throw TransportError("poll: " + std::string(std::strerror(errno)));
      }
      if (rc == 0) continue;
      char chunk[4096];
      const ssize_t n = ::read(read_fd_, chunk, sizeof(chunk));
      if (n < 0) {
        if (errno == EINTR) continue;
        broken_ = true;
        throw TransportError("read from oracle process failed: " + std::string(std::strerror(errno)));
      }
      if (n == 0) {
        broken_ = true;
        throw TransportError("oracle process '" + command_ + "' closed its output");
      }
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  int timeout_ms_;
  std::string command_;
  pid_t pid_ = -1;
  int write_fd_ = -1;
  int read_fd_ = -1;
  std::string buffer_;
  bool broken_ = false;
  std::mutex mutex_;
};

}  // namespace

std::unique_ptr<Transport> make_subprocess_transport(const std::string& command, int timeout_ms) {
  return std::make_unique<SubprocessTransport>(command, timeout_ms);
}

}  // namespace latentpara
