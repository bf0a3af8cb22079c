#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mre/core/episode.hpp"
#include "mre/core/space.hpp"
#include "mre/envs/render.hpp"

namespace mre::envs {

struct EnvSpec {
  std::string id;
  SpaceSpec observation;
  SpaceSpec action;
  std::uint64_t max_steps = 0;
  std::string solve_predicate;
  std::vector<std::string> action_names;  // one per discrete action id
  Vec idle_action;                        // applied on human ticks without input
};

struct StepResult {
  Vec obs;
  double reward = 0.0;
  bool done = false;
  Terminal terminal = Terminal::Truncated;  // meaningful when done
};

enum class ActionQuality { Good, Bad, Neutral };

/// A deterministic, seedable control environment with a scripted teacher.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual const EnvSpec& spec() const = 0;
  virtual Vec reset(std::uint64_t seed) = 0;
  /// Throws std::invalid_argument for an action outside the action space.
  virtual StepResult step(const Vec& action) = 0;
  virtual Vec observation() const = 0;
  virtual std::uint64_t elapsed() const = 0;

  /// Action the scripted teacher takes in the current state.
  virtual Vec teacher_action() const = 0;
  /// Quality of `action` in the current state, where the environment can
  /// judge it.
  virtual std::optional<ActionQuality> action_quality(const Vec& action) const {
    (void)action;
    return std::nullopt;
  }
  virtual RenderFrame render() const = 0;

  /// Maps a client action id onto an action vector (discrete action spaces).
  Vec action_from_id(std::int64_t id) const;
};

/// "mountain_car" or "lander". Throws std::invalid_argument otherwise.
std::unique_ptr<Environment> make_env(std::string_view id);
std::vector<std::string> env_ids();

}  // namespace mre::envs
