#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "mre/bridge/protocol.hpp"
#include "mre/bridge/socket.hpp"

namespace mre::bridge {

struct ServerOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks an ephemeral port
  double tick_rate = 30.0;
  std::size_t frame_queue = 256;  // per connection; oldest frames drop first
  std::filesystem::path model_dir = ".";
};

/// Reads MRE_BIND ("host:port" or ":port") into `base`.
ServerOptions options_from_env(ServerOptions base = {});

class Connection;

/// Hosts one training session per TCP connection. Clients send `join`,
/// receive `hello`, then stream inputs while the server streams frames.
class BridgeServer {
 public:
  explicit BridgeServer(ServerOptions options);
  ~BridgeServer();
  BridgeServer(const BridgeServer&) = delete;
  BridgeServer& operator=(const BridgeServer&) = delete;

  /// Binds and starts accepting. Throws std::runtime_error on bind failure.
  void start();
  void stop();
  std::uint16_t port() const { return port_; }
  std::size_t connections_served() const { return served_.load(); }

 private:
  void accept_loop();

  ServerOptions options_;
  Socket listener_;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::atomic<std::size_t> served_{0};
  std::thread acceptor_;
  std::mutex mutex_;
  std::list<std::unique_ptr<Connection>> connections_;
};

}  // namespace mre::bridge
