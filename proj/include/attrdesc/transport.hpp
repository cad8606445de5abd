#pragma once

// Newline-delimited byte streams over pipes and TCP sockets (POSIX).

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace attrdesc {

class LineChannel {
 public:
  virtual ~LineChannel() = default;
  /// Appends '\n'. Throws ProtocolError if the peer is gone.
  virtual void write_line(std::string_view line) = 0;
  /// Next line without its '\n'; nullopt at end of stream. Throws ProtocolError on timeout.
  virtual std::optional<std::string> read_line(std::chrono::milliseconds timeout) = 0;
  /// Half-closes the outgoing direction.
  virtual void close_write() = 0;
};

/// Channel over a pair of file descriptors it owns (may be the same socket).
class FdChannel final : public LineChannel {
 public:
  FdChannel(int read_fd, int write_fd, std::size_t max_line_bytes = std::size_t{1} << 30);
  ~FdChannel() override;
  FdChannel(const FdChannel&) = delete;
  FdChannel& operator=(const FdChannel&) = delete;

  void write_line(std::string_view line) override;
  std::optional<std::string> read_line(std::chrono::milliseconds timeout) override;
  void close_write() override;

 private:
  int read_fd_;
  int write_fd_;
  bool is_socket_;
  std::size_t max_line_bytes_;
  std::string buffer_;
  std::size_t scanned_ = 0;
};

/// `/bin/sh -c command` with stdin/stdout piped; stderr is inherited.
class ChildProcess {
 public:
  explicit ChildProcess(const std::string& command);
  ~ChildProcess();
  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  LineChannel& channel() { return *channel_; }
  /// Waits up to `grace` for exit, then terminates. Returns the exit status (or -signal).
  int reap(std::chrono::milliseconds grace);

 private:
  int pid_ = -1;
  std::unique_ptr<FdChannel> channel_;
  std::optional<int> status_;
};

std::unique_ptr<LineChannel> tcp_connect(const std::string& host, std::uint16_t port,
                                         std::chrono::milliseconds timeout);

class TcpListener {
 public:
  /// Port 0 picks an ephemeral port.
  explicit TcpListener(std::uint16_t port, const std::string& bind_address = "127.0.0.1");
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  std::unique_ptr<LineChannel> accept();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

}  // namespace attrdesc
