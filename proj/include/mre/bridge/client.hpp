#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mre/bridge/protocol.hpp"
#include "mre/bridge/socket.hpp"

namespace mre::bridge {

/// Blocking protocol client.
class BridgeClient {
 public:
  BridgeClient(const std::string& host, std::uint16_t port);

  void send(const ClientMessage& m);
  void send_raw(std::string_view bytes);
  /// Next server message, or nullopt on timeout. Throws std::runtime_error
  /// if the connection closed, ProtocolError on a malformed server message.
  std::optional<ServerMessage> receive(std::chrono::milliseconds timeout);
  void close() { socket_.shutdown(); }

 private:
  Socket socket_;
  MessageDecoder decoder_;
};

struct Transcript {
  HelloMessage hello;
  std::vector<ServerMessage> messages;  // everything after hello, in arrival order

  std::vector<FrameMessage> frames() const;
  std::vector<session::EpisodeMetrics> episode_metrics() const;
  std::vector<std::string> errors() const;
  std::vector<session::ControlOwner> owners() const;
};

/// Joins, plays `script` in order, then sends `sync` and collects every
/// server message until the matching sync reply. Reads concurrently with
/// sending. Throws std::runtime_error on timeout.
Transcript headless_client(const std::string& host, std::uint16_t port, const JoinMessage& join,
                           std::span<const InputMessage> script,
                           std::chrono::milliseconds timeout = std::chrono::seconds(30));

}  // namespace mre::bridge
