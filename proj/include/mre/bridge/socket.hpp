#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace mre::bridge {

/// Owning POSIX socket descriptor.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& o) noexcept : fd_(o.release()) {}
  Socket& operator=(Socket&& o) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() { close(); }

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  int release() {
    const int f = fd_;
    fd_ = -1;
    return f;
  }
  void close();
  /// Unblocks readers and writers on other threads.
  void shutdown();

  /// Throws std::runtime_error on failure.
  void send_all(std::string_view bytes);
  /// Waits up to `timeout` for data. Returns the bytes read, an empty string
  /// on timeout, and sets `eof` when the peer closed the connection.
  std::string receive(std::chrono::milliseconds timeout, bool& eof);

 private:
  int fd_ = -1;
};

/// Throws std::runtime_error if the address cannot be bound.
Socket listen_tcp(const std::string& host, std::uint16_t port);
std::uint16_t local_port(const Socket& s);
/// Waits up to `timeout` for a connection; returns an invalid socket on
/// timeout and sets `closed` once the listener was shut down.
Socket accept_tcp(const Socket& listener, std::chrono::milliseconds timeout, bool& closed);
Socket connect_tcp(const std::string& host, std::uint16_t port);

}  // namespace mre::bridge
