#pragma once

#include <cstdint>

#include "mre/envs/environment.hpp"

namespace mre::envs::mountain_car {

inline constexpr double kMinPosition = -1.2;
inline constexpr double kMaxPosition = 0.6;
inline constexpr double kMaxSpeed = 0.07;
inline constexpr double kGoalPosition = 0.5;
inline constexpr double kForce = 0.001;
inline constexpr double kGravity = 0.0025;
inline constexpr std::uint64_t kMaxSteps = 200;

struct State {
  double position = -0.5;
  double velocity = 0.0;
  bool operator==(const State&) const = default;
};

struct Outcome {
  State next;
  double reward = -1.0;
  bool solved = false;
};

/// Initial state: position uniform in [-0.6, -0.4], zero velocity.
State reset(std::uint64_t seed);

/// Classic-control dynamics. action in {0: push left, 1: none, 2: push right};
/// throws std::invalid_argument otherwise.
Outcome step(const State& s, int action);

/// Pushes along the velocity; pushes right from rest.
int energy_teacher(const State& s);

/// Good iff the push adds mechanical energy (same sign as velocity).
ActionQuality action_quality(const State& s, int action);

class Env final : public Environment {
 public:
  Env();
  const EnvSpec& spec() const override { return spec_; }
  Vec reset(std::uint64_t seed) override;
  StepResult step(const Vec& action) override;
  Vec observation() const override { return {state_.position, state_.velocity}; }
  std::uint64_t elapsed() const override { return steps_; }
  Vec teacher_action() const override;
  std::optional<ActionQuality> action_quality(const Vec& action) const override;
  RenderFrame render() const override;

  const State& state() const { return state_; }

 private:
  EnvSpec spec_;
  State state_;
  std::uint64_t steps_ = 0;
};

}  // namespace mre::envs::mountain_car
