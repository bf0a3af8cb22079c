#include "mre/envs/mountain_car.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mre/core/rng.hpp"

namespace mre::envs::mountain_car {

State reset(std::uint64_t seed) {
  Rng rng(seed);
  return {rng.uniform(-0.6, -0.4), 0.0};
}

Outcome step(const State& s, int action) {
  if (action < 0 || action > 2) {
    throw std::invalid_argument("mountain car action must be 0, 1 or 2, got " +
                                std::to_string(action));
  }
  Outcome o;
  double v = s.velocity + (action - 1) * kForce - kGravity * std::cos(3.0 * s.position);
  v = std::clamp(v, -kMaxSpeed, kMaxSpeed);
  double p = s.position + v;
  p = std::clamp(p, kMinPosition, kMaxPosition);
  if (p == kMinPosition && v < 0.0) v = 0.0;
  o.next = {p, v};
  o.solved = p >= kGoalPosition;
  return o;
}

int energy_teacher(const State& s) { return s.velocity >= 0.0 ? 2 : 0; }

ActionQuality action_quality(const State& s, int action) {
  if (action == 1 || s.velocity == 0.0) return ActionQuality::Neutral;
  const bool push_right = action == 2;
  return push_right == (s.velocity > 0.0) ? ActionQuality::Good : ActionQuality::Bad;
}

Env::Env() {
  spec_.id = "mountain_car";
  spec_.observation = SpaceSpec({ContinuousDim{kMinPosition, kMaxPosition},
                                 ContinuousDim{-kMaxSpeed, kMaxSpeed}});
  spec_.action = SpaceSpec({DiscreteDim{3}});
  spec_.max_steps = kMaxSteps;
  spec_.solve_predicate = "position >= 0.5";
  spec_.action_names = {"left", "none", "right"};
  spec_.idle_action = {1.0};
}

Vec Env::reset(std::uint64_t seed) {
  state_ = mountain_car::reset(seed);
  steps_ = 0;
  return observation();
}

StepResult Env::step(const Vec& action) {
  if (action.size() != 1 || action[0] != std::floor(action[0])) {
    throw std::invalid_argument("mountain car expects one integral action component");
  }
  const Outcome o = mountain_car::step(state_, static_cast<int>(action[0]));
  state_ = o.next;
  ++steps_;
  StepResult r;
  r.obs = observation();
  r.reward = o.reward;
  if (o.solved) {
    r.done = true;
    r.terminal = Terminal::Solved;
  } else if (steps_ >= kMaxSteps) {
    r.done = true;
    r.terminal = Terminal::Truncated;
  }
  return r;
}

Vec Env::teacher_action() const { return {static_cast<double>(energy_teacher(state_))}; }

std::optional<ActionQuality> Env::action_quality(const Vec& action) const {
  if (action.size() != 1) return std::nullopt;
  return mountain_car::action_quality(state_, static_cast<int>(action[0]));
}

RenderFrame Env::render() const {
  auto nx = [](double p) { return (p - kMinPosition) / (kMaxPosition - kMinPosition); };
  auto ny = [](double p) { return 0.1 + 0.35 * (std::sin(3.0 * p) + 1.0); };
  RenderFrame f;
  Shape hill{Shape::Kind::Line, {}, 0.0, "", "#8a8a8a"};
  for (int i = 0; i <= 60; ++i) {
    const double p = kMinPosition + (kMaxPosition - kMinPosition) * i / 60.0;
    hill.points.push_back({nx(p), ny(p)});
  }
  f.shapes.push_back(std::move(hill));
  f.shapes.push_back({Shape::Kind::Line,
                      {{nx(kGoalPosition), ny(kGoalPosition)},
                       {nx(kGoalPosition), ny(kGoalPosition) + 0.1}},
                      0.0, "", "#e0c020"});
  f.shapes.push_back({Shape::Kind::Circle,
                      {{nx(state_.position), ny(state_.position) + 0.03}},
                      0.03, "", "#ff8800"});
  f.shapes.push_back({Shape::Kind::Text, {{0.02, 0.95}}, 0.0,
                      "step " + std::to_string(steps_), "#ffffff"});
  return f;
}

}  // namespace mre::envs::mountain_car
