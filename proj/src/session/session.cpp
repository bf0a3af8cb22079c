#include "mre/session/session.hpp"

#include <cstdio>
#include <iostream>
#include <stdexcept>

namespace mre::session {

namespace {

constexpr std::uint64_t kPolicyStream = 0x5ce55e55ULL;

ControlSource source_of(ControlOwner o) {
  switch (o) {
    case ControlOwner::Policy: return ControlSource::Agent;
    case ControlOwner::Human: return ControlSource::Human;
    case ControlOwner::Teacher: return ControlSource::Teacher;
    case ControlOwner::RandomBaseline: return ControlSource::Random;
  }
  return ControlSource::Agent;
}

bool is_demo_owner(ControlOwner o) {
  return o == ControlOwner::Human || o == ControlOwner::Teacher;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string metrics_csv_header() {
  return "episode,reward,solved,competence,demo_steps,good_actions,bad_actions\n";
}

std::string metrics_csv_row(const EpisodeMetrics& m) {
  return std::to_string(m.episode) + "," + fixed6(m.reward) + "," + (m.solved ? "1" : "0") + "," +
         (m.competence ? fixed6(*m.competence) : std::string()) + "," +
         std::to_string(m.demo_steps) + "," + std::to_string(m.good_actions) + "," +
         std::to_string(m.bad_actions) + "\n";
}

std::string metrics_csv(const std::vector<EpisodeMetrics>& timeline) {
  std::string out = metrics_csv_header();
  for (const auto& m : timeline) out += metrics_csv_row(m);
  return out;
}

DemonstrationStack make_stack(const envs::EnvSpec& spec, const SessionConfig& cfg) {
  auto schema = std::make_shared<const QuantizationSchema>(
      QuantizationSchema::halving(spec.observation, spec.action, cfg.max_level));
  auto fallback = cfg.fallback == "idle" ? FallbackPolicy::idle(spec.action, spec.idle_action)
                                         : FallbackPolicy::uniform_random(spec.action);
  return DemonstrationStack(std::move(schema), cfg.max_order, std::move(fallback),
                            cfg.min_match_level);
}

Session::Session(SessionConfig cfg)
    : cfg_((cfg.validate(), std::move(cfg))),
      env_(envs::make_env(cfg_.env_id)),
      stack_(make_stack(env_->spec(), cfg_)) {}

Session::Session(SessionConfig cfg, DemonstrationStack stack)
    : cfg_((cfg.validate(), std::move(cfg))),
      env_(envs::make_env(cfg_.env_id)),
      stack_(std::move(stack)) {
  if (!(stack_.schema().observation() == env_->spec().observation) ||
      !(stack_.schema().action() == env_->spec().action)) {
    throw std::invalid_argument("model spaces do not match environment '" + cfg_.env_id + "'");
  }
  cfg_.max_order = stack_.max_order();
  cfg_.max_level = stack_.schema().max_level();
  cfg_.min_match_level = stack_.min_match_level();
}

void Session::enqueue(Command c) {
  std::lock_guard lock(commands_mutex_);
  commands_.push_back(c);
}

void Session::takeover(bool on) {
  enqueue({on ? Command::Kind::TakeoverOn : Command::Kind::TakeoverOff});
}
void Session::press(std::int64_t action_id) { enqueue({Command::Kind::Key, action_id}); }
void Session::request_reset() { enqueue({Command::Kind::Reset}); }
void Session::set_min_match_level(int level) {
  if (level < 0 || level > stack_.schema().max_level()) {
    throw std::invalid_argument("min_match_level out of range");
  }
  enqueue({Command::Kind::MinMatchLevel, level});
}
void Session::set_ingest_on_release(bool on) {
  enqueue({Command::Kind::IngestOnRelease, on ? 1 : 0});
}

void Session::begin_episode() {
  const std::uint64_t seed = mix_seed(cfg_.seed, episode_);
  obs_ = env_->reset(seed);
  trace_ = Episode{};
  trace_.seed = seed;
  history_.clear();
  decisions_.clear();
  tick_competence_.clear();
  rng_ = Rng(mix_seed(seed, kPolicyStream));
  ingested_upto_ = 0;
  running_ = EpisodeMetrics{};
  running_.episode = episode_;
  last_owner_ = ControlOwner::Policy;
  active_ = true;
}

bool Session::ingest_pending(std::size_t end) {
  Demonstration demo = demonstration_from_steps(trace_.steps, ingested_upto_, end,
                                                stack_.max_order(), next_demo_id_, {});
  ingested_upto_ = end;
  if (demo.empty()) return false;
  stack_.add_demonstration(demo);
  ++next_demo_id_;
  return true;
}

EpisodeMetrics Session::finish_episode(Terminal terminal) {
  ingest_pending(trace_.steps.size());
  trace_.terminal = terminal;
  EpisodeMetrics m = running_;
  m.terminal = terminal;
  m.solved = terminal == Terminal::Solved;
  m.steps = trace_.steps.size();
  if (m.policy_ticks > 0) {
    m.competence = static_cast<double>(m.matched_ticks) / static_cast<double>(m.policy_ticks);
  }
  timeline_.push_back(m);
  active_ = false;
  ++episode_;
  return m;
}

TickReport Session::tick() {
  if (!active_) begin_episode();

  bool latched_on = false;
  bool reset = false;
  std::optional<std::int64_t> key;
  {
    std::lock_guard lock(commands_mutex_);
    for (const Command& c : commands_) {
      switch (c.kind) {
        case Command::Kind::TakeoverOn: human_ = true; latched_on = true; break;
        case Command::Kind::TakeoverOff: human_ = false; break;
        case Command::Kind::Key: key = c.value; break;
        case Command::Kind::Reset: reset = true; break;
        case Command::Kind::MinMatchLevel: stack_.set_min_match_level(static_cast<int>(c.value)); break;
        case Command::Kind::IngestOnRelease: cfg_.ingest_on_release = c.value != 0; break;
      }
    }
    commands_.clear();
  }

  TickReport rep;
  rep.episode = episode_;
  rep.tick = trace_.steps.size();
  if (reset && !trace_.steps.empty()) {
    rep.done = true;
    rep.metrics = finish_episode(Terminal::Truncated);
    rep.owner = last_owner_;
    return rep;
  }

  const ControlOwner owner =
      (human_ || latched_on) ? ControlOwner::Human : cfg_.scheduled_owner(episode_, rep.tick);
  rep.owner = owner;

  if (cfg_.ingest_on_release && rep.tick > 0 && is_demo_owner(last_owner_) &&
      !is_demo_owner(owner)) {
    rep.ingested = ingest_pending(trace_.steps.size());
  }

  const envs::EnvSpec& spec = env_->spec();
  Vec action;
  switch (owner) {
    case ControlOwner::Human:
      action = spec.idle_action;
      if (key) {
        try {
          action = env_->action_from_id(*key);
        } catch (const std::invalid_argument&) {
          ++ignored_keys_;
        }
      }
      break;
    case ControlOwner::Teacher:
      action = env_->teacher_action();
      break;
    case ControlOwner::RandomBaseline:
      action = FallbackPolicy::uniform_random(spec.action)(obs_, rng_);
      break;
    case ControlOwner::Policy: {
      PolicyDecision d = demo_stack_policy(stack_, obs_, history_, rng_);
      action = std::move(d.action);
      rep.provenance = d.provenance;
      decisions_.emplace_back(rep.tick, d.provenance);
      ++running_.policy_ticks;
      if (d.matched()) ++running_.matched_ticks;
      break;
    }
  }
  if (key && owner != ControlOwner::Human) ++ignored_keys_;
  if (is_demo_owner(owner)) ++running_.demo_steps;
  if (const auto q = env_->action_quality(action)) {
    if (*q == envs::ActionQuality::Good) ++running_.good_actions;
    if (*q == envs::ActionQuality::Bad) ++running_.bad_actions;
  }

  envs::StepResult r;
  try {
    r = env_->step(action);
  } catch (const std::exception& e) {
    std::clog << "environment fault in episode " << episode_ << ": " << e.what() << "\n";
    rep.action = std::move(action);
    rep.done = true;
    rep.metrics = finish_episode(Terminal::Truncated);
    return rep;
  }

  StepRecord rec;
  rec.t = rep.tick + 1;
  rec.obs = obs_;
  rec.action = action;
  rec.reward = r.reward;
  rec.source = source_of(owner);
  trace_.steps.push_back(std::move(rec));
  history_.push_back(action);
  running_.reward += r.reward;
  if (running_.policy_ticks > 0) {
    tick_competence_.push_back(static_cast<double>(running_.matched_ticks) /
                               static_cast<double>(running_.policy_ticks));
  } else {
    tick_competence_.push_back(std::nullopt);
  }

  rep.obs = std::move(obs_);
  obs_ = std::move(r.obs);
  rep.action = std::move(action);
  rep.reward = r.reward;
  last_owner_ = owner;
  if (r.done) {
    rep.done = true;
    rep.metrics = finish_episode(r.terminal);
  }
  return rep;
}

EpisodeMetrics Session::run_episode() {
  for (;;) {
    TickReport r = tick();
    if (r.done) return *r.metrics;
  }
}

}  // namespace mre::session
