#include "attrdesc/transport.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

#include "attrdesc/error.hpp"

namespace attrdesc {
namespace {

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

bool fd_is_socket(int fd) {
  struct stat st {};
  return fstat(fd, &st) == 0 && S_ISSOCK(st.st_mode);
}

}  // namespace

FdChannel::FdChannel(int read_fd, int write_fd, std::size_t max_line_bytes)
    : read_fd_(read_fd), write_fd_(write_fd), is_socket_(fd_is_socket(write_fd)), max_line_bytes_(max_line_bytes) {}

FdChannel::~FdChannel() {
  if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
  if (read_fd_ >= 0) ::close(read_fd_);
}

void FdChannel::write_line(std::string_view line) {
  if (write_fd_ < 0) throw ProtocolError("channel closed for writing");
  std::string data(line);
  data += '\n';
  std::size_t done = 0;
  while (done < data.size()) {
    ssize_t n = is_socket_ ? ::send(write_fd_, data.data() + done, data.size() - done, MSG_NOSIGNAL)
                           : ::write(write_fd_, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(errno_text("write to peer failed"));
    }
    done += static_cast<std::size_t>(n);
  }
}

std::optional<std::string> FdChannel::read_line(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    const auto eol = buffer_.find('\n', scanned_);
    if (eol != std::string::npos) {
      std::string line = buffer_.substr(0, eol);
      buffer_.erase(0, eol + 1);
      scanned_ = 0;
      return line;
    }
    scanned_ = buffer_.size();
    if (buffer_.size() > max_line_bytes_) throw ProtocolError("malformed message: line exceeds size limit");
    if (read_fd_ < 0) return std::nullopt;

    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) throw ProtocolError("timeout waiting for peer");
    pollfd pfd{read_fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(std::min<std::int64_t>(remaining.count(), 1 << 30)));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(errno_text("poll failed"));
    }
    if (ready == 0) throw ProtocolError("timeout waiting for peer");

    char chunk[1 << 16];
    const ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      throw ProtocolError(errno_text("read from peer failed"));
    }
    if (n == 0) {
      // A trailing unterminated fragment still counts as a line.
      if (buffer_.empty()) return std::nullopt;
      std::string line = std::move(buffer_);
      buffer_.clear();
      scanned_ = 0;
      return line;
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

void FdChannel::close_write() {
  if (write_fd_ < 0) return;
  if (write_fd_ == read_fd_) {
    ::shutdown(write_fd_, SHUT_WR);
  } else {
    ::close(write_fd_);
  }
  write_fd_ = -1;
}

ChildProcess::ChildProcess(const std::string& command) {
  int to_child[2];
  int from_child[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0) throw RendererError(errno_text("pipe"));
  if (::pipe2(from_child, O_CLOEXEC) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw RendererError(errno_text("pipe"));
  }
  // A peer that exits early must surface as a write error, not kill this process.
  ::signal(SIGPIPE, SIG_IGN);
  pid_ = ::fork();
  if (pid_ < 0) throw RendererError(errno_text("fork"));
  if (pid_ == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  channel_ = std::make_unique<FdChannel>(from_child[0], to_child[1]);
}

ChildProcess::~ChildProcess() {
  if (pid_ > 0 && !status_) reap(std::chrono::milliseconds(2000));
}

int ChildProcess::reap(std::chrono::milliseconds grace) {
  if (status_) return *status_;
  channel_->close_write();
  auto deadline = std::chrono::steady_clock::now() + grace;
  int raw = 0;
  bool signalled = false;
  for (;;) {
    const pid_t r = ::waitpid(pid_, &raw, WNOHANG);
    if (r == pid_) break;
    if (r < 0 && errno != EINTR) {
      status_ = -1;
      return *status_;
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      if (signalled) {
        ::kill(pid_, SIGKILL);
        ::waitpid(pid_, &raw, 0);
        break;
      }
      ::kill(pid_, SIGTERM);
      signalled = true;
      deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(1000);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  status_ = WIFEXITED(raw) ? WEXITSTATUS(raw) : -WTERMSIG(raw);
  return *status_;
}

std::unique_ptr<LineChannel> tcp_connect(const std::string& host, std::uint16_t port,
                                         std::chrono::milliseconds timeout) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* results = nullptr;
  const std::string service = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &results); rc != 0)
    throw RendererError("resolve " + host + ": " + gai_strerror(rc));
  std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(results, ::freeaddrinfo);
  for (addrinfo* ai = results; ai; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
    if (fd < 0) continue;
    // Non-blocking connect so the timeout applies.
    const int flags = ::fcntl(fd, F_GETFL);
    ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
    int rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
    if (rc != 0 && errno == EINPROGRESS) {
      pollfd pfd{fd, POLLOUT, 0};
      if (::poll(&pfd, 1, static_cast<int>(timeout.count())) == 1) {
        int err = 0;
        socklen_t len = sizeof err;
        ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
        rc = err == 0 ? 0 : -1;
      }
    }
    if (rc == 0) {
      ::fcntl(fd, F_SETFL, flags);
      return std::make_unique<FdChannel>(fd, fd);
    }
    ::close(fd);
  }
  throw RendererError("cannot connect to " + host + ":" + service);
}

TcpListener::TcpListener(std::uint16_t port, const std::string& bind_address) {
  fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd_ < 0) throw RendererError(errno_text("socket"));
  const int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, bind_address.c_str(), &addr.sin_addr) != 1)
    throw RendererError("bad bind address " + bind_address);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd_, 4) != 0) {
    const std::string msg = errno_text("listen");
    ::close(fd_);
    throw RendererError(msg);
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<LineChannel> TcpListener::accept() {
  for (;;) {
    const int fd = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (fd >= 0) return std::make_unique<FdChannel>(fd, fd);
    if (errno != EINTR) throw RendererError(errno_text("accept"));
  }
}

}  // namespace attrdesc
