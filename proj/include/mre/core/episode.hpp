#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mre/core/space.hpp"

namespace mre {

enum class ControlSource : std::uint8_t { Human, Agent, Teacher, Random };
enum class Terminal : std::uint8_t { Solved, Failed, Truncated };

std::string_view to_string(ControlSource s);
std::string_view to_string(Terminal t);
std::optional<ControlSource> parse_control_source(std::string_view s);

inline bool is_demonstration(ControlSource s) {
  return s == ControlSource::Human || s == ControlSource::Teacher;
}

struct StepRecord {
  std::uint64_t t = 1;  // 1-based
  Vec obs;
  Vec action;
  double reward = 0.0;  // metrics only
  ControlSource source = ControlSource::Agent;
};

struct Episode {
  std::vector<StepRecord> steps;
  Terminal terminal = Terminal::Truncated;
  std::uint64_t seed = 0;

  std::size_t length() const { return steps.size(); }
  /// Throws std::invalid_argument unless t runs 1..T with T >= 1.
  void validate() const;
};

/// One demonstrated step: the observation, the actions executed before it
/// (oldest first, any source), and the action taken.
struct Transition {
  Vec obs;
  std::vector<Vec> history;
  Vec action;
};

struct Demonstration {
  std::uint64_t id = 0;
  std::vector<Transition> transitions;

  bool empty() const { return transitions.empty(); }
};

/// Collects the steps of `episode` selected by `keep` (default: Human and
/// Teacher steps). Each transition's history holds up to `max_order` actions
/// drawn from the full executed trace, regardless of who chose them.
Demonstration demonstration_from_episode(
    const Episode& episode, int max_order, std::uint64_t id = 0,
    const std::function<bool(const StepRecord&)>& keep = {});

/// As above, restricted to the 0-based step index range [first, last).
Demonstration demonstration_from_steps(std::span<const StepRecord> trace, std::size_t first,
                                       std::size_t last, int max_order, std::uint64_t id,
                                       const std::function<bool(const StepRecord&)>& keep);

}  // namespace mre
