#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mre/core/quantize.hpp"
#include "mre/core/space.hpp"

namespace mre {

/// Canonical byte encoding of a quantized extended state:
///   u8 order, u8 level, then little-endian i64 bins of the observation
///   followed by the bins of each history action, oldest first.
using StateKey = std::string;

inline constexpr int kMaxOrder = 255;

/// Appends `v` as 8 little-endian bytes.
inline void put_i64(std::string& out, std::int64_t v) {
  auto u = static_cast<std::uint64_t>(v);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((u >> (8 * i)) & 0xff);
  out.append(b, 8);
}

/// Writes a key from precomputed level bins. `history_bins` holds exactly
/// `order` actions, flattened, oldest first.
void write_key(std::string& out, int order, int level, std::span<const std::int64_t> obs_bins,
               std::span<const std::int64_t> history_bins);

/// Encodes (obs, history) at quantization `level`. The key's order is
/// history.size(). Throws std::invalid_argument on dimension mismatch or a
/// level outside the schema.
StateKey encode_key(std::span<const double> obs, std::span<const Vec> history,
                    const QuantizationSchema& schema, int level);

struct DecodedKey {
  int order = 0;
  int level = 0;
  std::vector<std::int64_t> obs_bins;
  std::vector<std::vector<std::int64_t>> history_bins;
};

/// Inverse of the byte layout; needs the schema for dimension counts.
DecodedKey decode_key(std::string_view key, const QuantizationSchema& schema);

}  // namespace mre
