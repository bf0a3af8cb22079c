#include "mre/bridge/client.hpp"

#include <atomic>
#include <condition_variable>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace mre::bridge {

BridgeClient::BridgeClient(const std::string& host, std::uint16_t port)
    : socket_(connect_tcp(host, port)) {}

void BridgeClient::send(const ClientMessage& m) { socket_.send_all(encode_message(to_json(m))); }

void BridgeClient::send_raw(std::string_view bytes) { socket_.send_all(bytes); }

std::optional<ServerMessage> BridgeClient::receive(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    if (auto item = decoder_.next()) {
      if (auto* err = std::get_if<DecodeError>(&*item)) throw ProtocolError(err->message);
      return parse_server_message(std::get<json>(*item));
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) return std::nullopt;
    bool eof = false;
    const std::string bytes = socket_.receive(left, eof);
    if (eof) throw std::runtime_error("connection closed by server");
    decoder_.feed(bytes);
  }
}

std::vector<FrameMessage> Transcript::frames() const {
  std::vector<FrameMessage> out;
  for (const auto& m : messages) {
    if (const auto* f = std::get_if<FrameMessage>(&m)) out.push_back(*f);
  }
  return out;
}

std::vector<session::EpisodeMetrics> Transcript::episode_metrics() const {
  std::vector<session::EpisodeMetrics> out;
  for (const auto& m : messages) {
    if (const auto* e = std::get_if<EpisodeEndMessage>(&m)) out.push_back(e->metrics);
  }
  return out;
}

std::vector<std::string> Transcript::errors() const {
  std::vector<std::string> out;
  for (const auto& m : messages) {
    if (const auto* e = std::get_if<ErrorMessage>(&m)) out.push_back(e->message);
  }
  return out;
}

std::vector<session::ControlOwner> Transcript::owners() const {
  std::vector<session::ControlOwner> out;
  for (const auto& f : frames()) out.push_back(f.owner);
  return out;
}

Transcript headless_client(const std::string& host, std::uint16_t port, const JoinMessage& join,
                           std::span<const InputMessage> script,
                           std::chrono::milliseconds timeout) {
  BridgeClient client(host, port);
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  auto remaining = [&] {
    return std::max(std::chrono::milliseconds(1),
                    std::chrono::duration_cast<std::chrono::milliseconds>(
                        deadline - std::chrono::steady_clock::now()));
  };

  client.send(join);
  Transcript t;
  for (;;) {
    auto m = client.receive(remaining());
    if (!m) throw std::runtime_error("timed out waiting for hello");
    if (auto* h = std::get_if<HelloMessage>(&*m)) {
      t.hello = *h;
      break;
    }
    if (auto* e = std::get_if<ErrorMessage>(&*m)) throw std::runtime_error("join rejected: " + e->message);
  }

  std::mutex mu;
  std::string failure;
  std::atomic<bool> done{false};
  std::thread reader([&] {
    try {
      while (!done) {
        auto m = client.receive(std::chrono::milliseconds(50));
        if (!m) {
          if (std::chrono::steady_clock::now() >= deadline) throw std::runtime_error("timed out waiting for sync");
          continue;
        }
        const bool sync = std::holds_alternative<SyncMessage>(*m);
        std::lock_guard lock(mu);
        t.messages.push_back(std::move(*m));
        if (sync) done = true;
      }
    } catch (const std::exception& e) {
      std::lock_guard lock(mu);
      failure = e.what();
      done = true;
    }
  });

  try {
    for (const InputMessage& in : script) client.send(in);
    InputMessage sync;
    sync.kind = InputMessage::Kind::Sync;
    client.send(sync);
  } catch (...) {
    done = true;
    reader.join();
    throw;
  }
  reader.join();
  client.close();
  if (!failure.empty()) throw std::runtime_error(failure);
  return t;
}

}  // namespace mre::bridge
