#include "mre/envs/lander.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "mre/core/rng.hpp"

namespace mre::envs::lander {

State reset(std::uint64_t seed) {
  Rng rng(seed);
  State s;
  s.x = rng.uniform(-3.0, 3.0);
  s.y = rng.uniform(8.0, 10.0);
  s.vx = rng.uniform(-0.5, 0.5);
  s.vy = 0.0;
  s.fuel = kFuel;
  return s;
}

double potential(const State& s) {
  return -(10.0 * std::abs(s.x) + 5.0 * std::abs(s.vx) + 5.0 * std::abs(s.vy));
}

Outcome step(const State& s, int action) {
  if (action < Noop || action > Right) {
    throw std::invalid_argument("lander action must be in [0, 3], got " + std::to_string(action));
  }
  Outcome o;
  State n = s;
  double ax = 0.0;
  double ay = -kGravity;
  double burn = 0.0;
  if (s.fuel > 0.0) {
    switch (action) {
      case Main: ay += kMainThrust; burn = kDt; break;
      case Left: ax = -kLateralThrust; burn = kLateralFuelRate * kDt; break;
      case Right: ax = kLateralThrust; burn = kLateralFuelRate * kDt; break;
      default: break;
    }
  }
  n.vx = s.vx + ax * kDt;
  n.vy = s.vy + ay * kDt;
  n.x = s.x + n.vx * kDt;
  n.y = s.y + n.vy * kDt;
  n.fuel = std::max(0.0, s.fuel - burn);

  o.reward = potential(n) - potential(s) - 3.0 * burn;
  if (n.y <= 0.0) {
    n.y = 0.0;
    o.done = true;
    const bool soft = std::abs(n.x) <= kPadHalfWidth && std::abs(n.vy) <= kSoftLandingSpeed;
    o.terminal = soft ? Terminal::Solved : Terminal::Failed;
    o.reward += soft ? 100.0 : -100.0;
  } else if (std::abs(n.x) > kMaxX || n.y > kMaxY || n.fuel <= 0.0) {
    o.done = true;
    o.terminal = Terminal::Failed;
    o.reward -= 100.0;
  }
  n.vx = std::clamp(n.vx, -kMaxVx, kMaxVx);
  n.vy = std::clamp(n.vy, kMinVy, kMaxVy);
  n.x = std::clamp(n.x, -kMaxX, kMaxX);
  n.y = std::clamp(n.y, 0.0, kMaxY);
  o.next = n;
  return o;
}

int pd_teacher(const State& s) {
  // Descent-rate target shrinks toward the ground; hold altitude while far
  // from the pad.
  double vy_ref = -std::clamp(0.2 + 0.3 * s.y, 0.4, 2.0);
  if (std::abs(s.x) > 1.5 * kPadHalfWidth && s.y < 4.0) vy_ref = std::max(vy_ref, -0.2);
  const double ax_des = -0.5 * s.x - 1.5 * s.vx;
  if (s.vy < vy_ref - 0.15) return Main;
  if (ax_des > 0.12) return Right;
  if (ax_des < -0.12) return Left;
  return s.vy < vy_ref ? Main : Noop;
}

Env::Env() {
  spec_.id = "lander";
  spec_.observation = SpaceSpec({ContinuousDim{-kMaxX, kMaxX}, ContinuousDim{0.0, kMaxY},
                                 ContinuousDim{-kMaxVx, kMaxVx}, ContinuousDim{kMinVy, kMaxVy}});
  spec_.action = SpaceSpec({DiscreteDim{4}});
  spec_.max_steps = kMaxSteps;
  spec_.solve_predicate = "touchdown with |x| <= 0.5 and |vy| <= 1.0";
  spec_.action_names = {"none", "main", "left", "right"};
  spec_.idle_action = {0.0};
}

Vec Env::reset(std::uint64_t seed) {
  state_ = lander::reset(seed);
  steps_ = 0;
  last_action_ = Noop;
  return observation();
}

Vec Env::observation() const { return {state_.x, state_.y, state_.vx, state_.vy}; }

StepResult Env::step(const Vec& action) {
  if (action.size() != 1 || action[0] != std::floor(action[0])) {
    throw std::invalid_argument("lander expects one integral action component");
  }
  const Outcome o = lander::step(state_, static_cast<int>(action[0]));
  state_ = o.next;
  last_action_ = static_cast<int>(action[0]);
  ++steps_;
  StepResult r;
  r.obs = observation();
  r.reward = o.reward;
  r.done = o.done;
  r.terminal = o.terminal;
  if (!r.done && steps_ >= kMaxSteps) {
    r.done = true;
    r.terminal = Terminal::Truncated;
  }
  return r;
}

Vec Env::teacher_action() const { return {static_cast<double>(pd_teacher(state_))}; }

RenderFrame Env::render() const {
  auto nx = [](double x) { return (x + kMaxX) / (2.0 * kMaxX); };
  auto ny = [](double y) { return 0.05 + 0.9 * y / kMaxY; };
  RenderFrame f;
  f.shapes.push_back({Shape::Kind::Line, {{0.0, ny(0)}, {1.0, ny(0)}}, 0.0, "", "#8a8a8a"});
  f.shapes.push_back({Shape::Kind::Line, {{nx(-kPadHalfWidth), ny(0)}, {nx(kPadHalfWidth), ny(0)}},
                      0.0, "", "#e0c020"});
  const double cx = nx(state_.x);
  const double cy = ny(state_.y);
  f.shapes.push_back({Shape::Kind::Polygon,
                      {{cx - 0.02, cy}, {cx + 0.02, cy}, {cx + 0.012, cy + 0.04}, {cx - 0.012, cy + 0.04}},
                      0.0, "", "#c0c0ff"});
  if (last_action_ == Main) {
    f.shapes.push_back({Shape::Kind::Line, {{cx, cy}, {cx, cy - 0.03}}, 0.0, "", "#ff6600"});
  } else if (last_action_ == Left || last_action_ == Right) {
    const double side = last_action_ == Left ? 0.02 : -0.02;
    f.shapes.push_back(
        {Shape::Kind::Line, {{cx + side, cy + 0.02}, {cx + 2 * side, cy + 0.02}}, 0.0, "", "#ff6600"});
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "fuel %.1f", state_.fuel);
  f.shapes.push_back({Shape::Kind::Text, {{0.02, 0.95}}, 0.0, buf, "#ffffff"});
  return f;
}

}  // namespace mre::envs::lander
