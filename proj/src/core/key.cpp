#include "mre/core/key.hpp"

#include <stdexcept>

namespace mre {

void write_key(std::string& out, int order, int level, std::span<const std::int64_t> obs_bins,
               std::span<const std::int64_t> history_bins) {
  out.clear();
  out.push_back(static_cast<char>(order));
  out.push_back(static_cast<char>(level));
  for (auto b : obs_bins) put_i64(out, b);
  for (auto b : history_bins) put_i64(out, b);
}

StateKey encode_key(std::span<const double> obs, std::span<const Vec> history,
                    const QuantizationSchema& schema, int level) {
  if (level < 0 || level > schema.max_level()) {
    throw std::invalid_argument("encode_key: level out of range");
  }
  if (history.size() > static_cast<std::size_t>(kMaxOrder)) {
    throw std::invalid_argument("encode_key: history longer than the maximum order");
  }
  if (obs.size() != schema.observation().size()) {
    throw std::invalid_argument("encode_key: observation dimension mismatch");
  }
  const std::size_t adims = schema.action().size();
  std::vector<std::int64_t> obs_bins = schema.obs_bins(obs, level);
  std::vector<std::int64_t> hist;
  hist.reserve(history.size() * adims);
  for (const Vec& a : history) {
    if (a.size() != adims) throw std::invalid_argument("encode_key: action dimension mismatch");
    auto b = schema.action_bins(a, level);
    hist.insert(hist.end(), b.begin(), b.end());
  }
  StateKey key;
  write_key(key, static_cast<int>(history.size()), level, obs_bins, hist);
  return key;
}

DecodedKey decode_key(std::string_view key, const QuantizationSchema& schema) {
  const std::size_t od = schema.observation().size();
  const std::size_t ad = schema.action().size();
  if (key.size() < 2) throw std::invalid_argument("decode_key: truncated key");
  DecodedKey out;
  out.order = static_cast<unsigned char>(key[0]);
  out.level = static_cast<unsigned char>(key[1]);
  const std::size_t expected = 2 + 8 * (od + ad * static_cast<std::size_t>(out.order));
  if (key.size() != expected) throw std::invalid_argument("decode_key: length mismatch");
  std::size_t pos = 2;
  auto next = [&]() {
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) {
      u |= static_cast<std::uint64_t>(static_cast<unsigned char>(key[pos + i])) << (8 * i);
    }
    pos += 8;
    return static_cast<std::int64_t>(u);
  };
  for (std::size_t d = 0; d < od; ++d) out.obs_bins.push_back(next());
  for (int k = 0; k < out.order; ++k) {
    auto& a = out.history_bins.emplace_back();
    for (std::size_t d = 0; d < ad; ++d) a.push_back(next());
  }
  return out;
}

}  // namespace mre
