#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mre/core/stack.hpp"

namespace mre {

/// Model file format (all integers little-endian):
///   "MRME" u8 version=1
///   header: observation SpaceSpec, action SpaceSpec, u32 levels, step
///           ladders (f64, continuous dims, observation then action),
///           u32 N, u32 K, u32 min_match_level, u8 fallback kind
///           [idle action f64s], u32 ensemble count
///   per ensemble, newest first: u32 section length, u64 source id,
///           u32 action count + actions (f64), then per model in
///           level-major/order-minor order: u32 entries, each
///           u32 key length + key bytes + u32 bag size + u32 refs
///   trailing u32 CRC32 of every preceding byte.
/// Entries within a model are written in key byte order, so the encoding of
/// a stack is canonical.
inline constexpr std::uint8_t kModelFormatVersion = 1;

class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

std::vector<std::uint8_t> serialize_stack(const DemonstrationStack& stack);

/// Throws FormatError on bad magic, version, truncation, CRC mismatch or
/// inconsistent contents. A stored Custom fallback cannot be restored; it
/// becomes `custom_fallback` if given, else uniform random.
DemonstrationStack deserialize_stack(std::span<const std::uint8_t> bytes,
                                     std::optional<FallbackPolicy> custom_fallback = {});

void save_stack(const DemonstrationStack& stack, const std::filesystem::path& path);
/// Throws std::runtime_error if the file cannot be read, FormatError if it
/// cannot be parsed.
DemonstrationStack load_stack(const std::filesystem::path& path);

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes);

}  // namespace mre
