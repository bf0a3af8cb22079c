#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mre/core/stack.hpp"

namespace mre {

struct EnsembleStats {
  std::uint64_t source_id = 0;
  std::size_t transitions = 0;
  std::size_t keys = 0;
  std::size_t stored_actions = 0;
  std::size_t memory_bytes = 0;
  std::vector<std::size_t> keys_per_model;  // level-major, order-minor
};

struct StackStats {
  std::size_t ensembles = 0;
  std::size_t transitions = 0;
  std::size_t keys = 0;
  std::size_t stored_actions = 0;
  std::size_t memory_bytes = 0;
  StackCounters counters;
  std::vector<EnsembleStats> per_ensemble;
};

StackStats stack_stats(const DemonstrationStack& stack);

/// One `key=value` line per figure, stable ordering, for diffing.
std::string to_key_value(const StackStats& stats);

}  // namespace mre
