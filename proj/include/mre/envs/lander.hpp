#pragma once

#include <cstdint>

#include "mre/envs/environment.hpp"

namespace mre::envs::lander {

inline constexpr double kDt = 1.0 / 30.0;
inline constexpr double kGravity = 1.6;
inline constexpr double kMainThrust = 3.0;
inline constexpr double kLateralThrust = 0.6;
inline constexpr double kPadHalfWidth = 0.5;
inline constexpr double kSoftLandingSpeed = 1.0;
inline constexpr double kFuel = 12.0;  // seconds of main-engine burn
inline constexpr double kLateralFuelRate = 0.5;
inline constexpr std::uint64_t kMaxSteps = 600;

inline constexpr double kMaxX = 6.0;
inline constexpr double kMaxY = 12.0;
inline constexpr double kMaxVx = 4.0;
inline constexpr double kMinVy = -8.0;
inline constexpr double kMaxVy = 4.0;

enum Action : int { Noop = 0, Main = 1, Left = 2, Right = 3 };

struct State {
  double x = 0.0;
  double y = 9.0;
  double vx = 0.0;
  double vy = 0.0;
  double fuel = kFuel;
  bool operator==(const State&) const = default;
};

struct Outcome {
  State next;
  double reward = 0.0;
  bool done = false;
  Terminal terminal = Terminal::Truncated;
};

/// x in [-3, 3], y in [8, 10], vx in [-0.5, 0.5], vy = 0, full tank.
State reset(std::uint64_t seed);

/// Semi-implicit Euler step at dt = 1/30 s. Throws std::invalid_argument
/// for an action outside {0, 1, 2, 3}.
Outcome step(const State& s, int action);

/// Proportional-derivative controller on (x, vx, vy): holds an altitude-
/// dependent descent rate with the main engine and steers toward the pad.
int pd_teacher(const State& s);

/// Shaping potential; per-step reward is its increase minus fuel cost.
double potential(const State& s);

class Env final : public Environment {
 public:
  Env();
  const EnvSpec& spec() const override { return spec_; }
  Vec reset(std::uint64_t seed) override;
  StepResult step(const Vec& action) override;
  Vec observation() const override;
  std::uint64_t elapsed() const override { return steps_; }
  Vec teacher_action() const override;
  RenderFrame render() const override;

  const State& state() const { return state_; }

 private:
  EnvSpec spec_;
  State state_;
  std::uint64_t steps_ = 0;
  int last_action_ = Noop;
};

}  // namespace mre::envs::lander
