#include "mre/bridge/wire.hpp"

#include <cctype>

namespace mre::bridge {

std::string encode_message(const json& payload) {
  const std::string body = payload.dump();
  return std::to_string(body.size()) + "\n" + body;
}

void MessageDecoder::compact() {
  if (pos_ > 4096 && pos_ * 2 > buf_.size()) {
    buf_.erase(0, pos_);
    pos_ = 0;
  }
}

std::optional<std::variant<json, DecodeError>> MessageDecoder::next() {
  const std::size_t nl = buf_.find('\n', pos_);
  if (nl == std::string::npos) {
    // A length line never needs more than a few digits.
    if (buf_.size() - pos_ > 16) {
      pos_ = buf_.size();
      compact();
      return DecodeError{"length line too long"};
    }
    return std::nullopt;
  }
  const std::string_view line(buf_.data() + pos_, nl - pos_);
  bool digits = !line.empty() && line.size() <= 8;
  for (char c : line) digits = digits && std::isdigit(static_cast<unsigned char>(c));
  if (!digits) {
    pos_ = nl + 1;
    compact();
    return DecodeError{"malformed length line"};
  }
  const std::size_t len = std::stoul(std::string(line));
  if (len > kMaxMessageBytes) {
    pos_ = nl + 1;
    compact();
    return DecodeError{"message too large"};
  }
  if (buf_.size() - (nl + 1) < len) return std::nullopt;
  const std::string_view body(buf_.data() + nl + 1, len);
  pos_ = nl + 1 + len;
  json j = json::parse(body, nullptr, false);
  compact();
  if (j.is_discarded()) return DecodeError{"payload is not valid JSON"};
  if (!j.is_object()) return DecodeError{"payload is not a JSON object"};
  return j;
}

}  // namespace mre::bridge
