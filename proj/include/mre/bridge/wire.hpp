#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

namespace mre::bridge {

using nlohmann::json;

/// Largest accepted payload.
inline constexpr std::size_t kMaxMessageBytes = 1 << 20;

/// Frames one message: ASCII decimal payload length, '\n', then the compact
/// JSON payload. Example: `15\n{"type":"sync"}`.
std::string encode_message(const json& payload);

struct DecodeError {
  std::string message;
};

/// Incremental decoder for a byte stream of framed messages. A malformed
/// length line is skipped up to its newline; a payload that is not valid
/// JSON is consumed. Both yield a DecodeError and decoding continues.
class MessageDecoder {
 public:
  void feed(std::string_view bytes) { buf_.append(bytes); }
  /// Next complete message or error; nullopt when more bytes are needed.
  std::optional<std::variant<json, DecodeError>> next();
  std::size_t buffered() const { return buf_.size() - pos_; }

 private:
  void compact();
  std::string buf_;
  std::size_t pos_ = 0;
};

}  // namespace mre::bridge
