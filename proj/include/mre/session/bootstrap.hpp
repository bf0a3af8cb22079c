#pragma once

#include <cstdint>
#include <ostream>
#include <string_view>

#include "mre/core/stack.hpp"

namespace mre::session {

struct BootstrapSummary {
  std::uint64_t episodes = 0;
  std::uint64_t records = 0;
  std::uint64_t matched = 0;
};

/// Rolls out the stacked policy with no human in the loop and writes one
/// JSON object per step (`obs`, `history`, `action`, `provenance`) after a
/// header line carrying the spaces and N. `history` always has N entries,
/// oldest first; slots before the episode start are null.
/// Throws std::invalid_argument if the stack is empty or does not fit the
/// environment.
BootstrapSummary bootstrap_export(const DemonstrationStack& stack, std::string_view env_id,
                                  std::uint64_t episodes, std::uint64_t seed, std::ostream& sink);

}  // namespace mre::session
