#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "mre/core/episode.hpp"
#include "mre/core/policy.hpp"
#include "mre/core/rng.hpp"
#include "mre/core/stack.hpp"
#include "mre/envs/environment.hpp"
#include "mre/session/config.hpp"

namespace mre::session {

struct EpisodeMetrics {
  std::uint64_t episode = 0;
  double reward = 0.0;
  bool solved = false;
  Terminal terminal = Terminal::Truncated;
  std::uint64_t steps = 0;
  std::uint64_t policy_ticks = 0;
  std::uint64_t matched_ticks = 0;
  std::optional<double> competence;  // matched / policy_ticks; absent with no policy ticks
  std::uint64_t demo_steps = 0;
  std::uint64_t good_actions = 0;
  std::uint64_t bad_actions = 0;
  bool operator==(const EpisodeMetrics&) const = default;
};

/// `episode,reward,solved,competence,demo_steps,good_actions,bad_actions`
/// with floats at 6 decimals; absent competence is an empty field.
std::string metrics_csv_header();
std::string metrics_csv_row(const EpisodeMetrics& m);
std::string metrics_csv(const std::vector<EpisodeMetrics>& timeline);

struct TickReport {
  std::uint64_t episode = 0;
  std::uint64_t tick = 0;  // 0-based within the episode
  ControlOwner owner = ControlOwner::Policy;
  Vec obs;  // observation the action was chosen on
  Vec action;
  double reward = 0.0;
  std::optional<Provenance> provenance;  // policy ticks only
  bool ingested = false;                 // an ensemble was pushed before this tick
  bool done = false;
  std::optional<EpisodeMetrics> metrics;  // set when the episode ended
};

/// Interactive training loop: each tick resolves one control owner, acts,
/// and records the step. Human and teacher steps are demonstrations; they
/// are built into a new ensemble at episode end, or when control is released
/// if `ingest_on_release` is set.
///
/// External commands (takeover, key presses, reset) may arrive from any
/// thread; they are queued and applied at the next tick boundary.
class Session {
 public:
  explicit Session(SessionConfig cfg);
  /// Continues training on top of an existing stack.
  Session(SessionConfig cfg, DemonstrationStack stack);

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  const SessionConfig& config() const { return cfg_; }
  const envs::Environment& env() const { return *env_; }
  const DemonstrationStack& stack() const { return stack_; }
  DemonstrationStack& stack() { return stack_; }

  // Commands, applied at the next tick boundary.
  void takeover(bool on);
  void press(std::int64_t action_id);
  void request_reset();
  void set_min_match_level(int level);
  void set_ingest_on_release(bool on);

  /// Advances one tick, starting a new episode if none is running.
  TickReport tick();
  /// Runs ticks until the current (or next) episode ends.
  EpisodeMetrics run_episode();

  bool in_episode() const { return active_; }
  std::uint64_t episode_index() const { return episode_; }
  const Episode& current_episode() const { return trace_; }
  /// Provenance of every policy tick of the current episode, in order.
  const std::vector<std::pair<std::uint64_t, Provenance>>& decision_trace() const {
    return decisions_;
  }

  /// Finished episodes in order; entries are never modified once appended.
  const std::vector<EpisodeMetrics>& metrics_timeline() const { return timeline_; }
  /// Running competence after each tick of the current episode.
  const std::vector<std::optional<double>>& tick_competence() const { return tick_competence_; }

  std::uint64_t ignored_keys() const { return ignored_keys_; }
  std::uint64_t demonstrations_ingested() const { return next_demo_id_; }

 private:
  struct Command {
    enum class Kind { TakeoverOn, TakeoverOff, Key, Reset, MinMatchLevel, IngestOnRelease };
    Kind kind;
    std::int64_t value = 0;
  };

  void begin_episode();
  EpisodeMetrics finish_episode(Terminal terminal);
  bool ingest_pending(std::size_t end);
  void enqueue(Command c);

  SessionConfig cfg_;
  std::unique_ptr<envs::Environment> env_;
  DemonstrationStack stack_;

  std::mutex commands_mutex_;
  std::deque<Command> commands_;
  bool human_ = false;
  std::uint64_t ignored_keys_ = 0;

  bool active_ = false;
  std::uint64_t episode_ = 0;  // index of the current or next episode
  Vec obs_;
  Episode trace_;
  std::vector<Vec> history_;
  std::vector<std::pair<std::uint64_t, Provenance>> decisions_;
  std::vector<std::optional<double>> tick_competence_;
  Rng rng_;
  ControlOwner last_owner_ = ControlOwner::Policy;
  std::size_t ingested_upto_ = 0;
  std::uint64_t next_demo_id_ = 0;
  EpisodeMetrics running_;

  std::vector<EpisodeMetrics> timeline_;
};

/// Stack with the schema implied by the environment and config.
DemonstrationStack make_stack(const envs::EnvSpec& spec, const SessionConfig& cfg);

}  // namespace mre::session
