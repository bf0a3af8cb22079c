#include "mre/core/episode.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace mre {

std::string_view to_string(ControlSource s) {
  switch (s) {
    case ControlSource::Human: return "human";
    case ControlSource::Agent: return "agent";
    case ControlSource::Teacher: return "teacher";
    case ControlSource::Random: return "random";
  }
  return "?";
}

std::string_view to_string(Terminal t) {
  switch (t) {
    case Terminal::Solved: return "solved";
    case Terminal::Failed: return "failed";
    case Terminal::Truncated: return "truncated";
  }
  return "?";
}

std::optional<ControlSource> parse_control_source(std::string_view s) {
  for (auto c : {ControlSource::Human, ControlSource::Agent, ControlSource::Teacher,
                 ControlSource::Random}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

void Episode::validate() const {
  if (steps.empty()) throw std::invalid_argument("episode has no steps");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i].t != i + 1) {
      throw std::invalid_argument("episode step " + std::to_string(i) + " has t=" +
                                  std::to_string(steps[i].t));
    }
  }
}

Demonstration demonstration_from_steps(std::span<const StepRecord> trace, std::size_t first,
                                       std::size_t last, int max_order, std::uint64_t id,
                                       const std::function<bool(const StepRecord&)>& keep) {
  if (max_order < 0) throw std::invalid_argument("max_order must be >= 0");
  last = std::min(last, trace.size());
  Demonstration demo;
  demo.id = id;
  for (std::size_t k = first; k < last; ++k) {
    const StepRecord& s = trace[k];
    if (keep ? !keep(s) : !is_demonstration(s.source)) continue;
    Transition tr;
    tr.obs = s.obs;
    tr.action = s.action;
    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(max_order), k);
    for (std::size_t h = k - n; h < k; ++h) tr.history.push_back(trace[h].action);
    demo.transitions.push_back(std::move(tr));
  }
  return demo;
}

Demonstration demonstration_from_episode(const Episode& episode, int max_order, std::uint64_t id,
                                         const std::function<bool(const StepRecord&)>& keep) {
  return demonstration_from_steps(episode.steps, 0, episode.steps.size(), max_order, id, keep);
}

}  // namespace mre
