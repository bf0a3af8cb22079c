#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mre::session {

enum class ControlOwner : std::uint8_t { Policy, Human, Teacher, RandomBaseline };

std::string_view to_string(ControlOwner o);
std::optional<ControlOwner> parse_owner(std::string_view s);

/// Overrides the default owner of one episode, optionally only for the
/// 0-based tick range [first_tick, last_tick).
struct ScheduleEntry {
  std::uint64_t episode = 0;
  ControlOwner owner = ControlOwner::Teacher;
  std::optional<std::uint64_t> first_tick;
  std::optional<std::uint64_t> last_tick;
  bool operator==(const ScheduleEntry&) const = default;
};

struct SessionConfig {
  std::string env_id = "mountain_car";
  std::uint64_t seed = 0;
  double tick_rate = 30.0;
  bool ingest_on_release = false;

  int max_order = 3;
  int max_level = 4;
  int min_match_level = 1;
  std::string fallback = "uniform";  // uniform | idle

  std::uint64_t baseline_episodes = 10;
  std::uint64_t teacher_episodes = 0;
  std::uint64_t eval_episodes = 0;
  std::vector<ScheduleEntry> schedule;

  bool save_model = true;

  std::uint64_t total_episodes() const {
    return baseline_episodes + teacher_episodes + eval_episodes;
  }
  /// Owner for `tick` of `episode` absent any takeover.
  ControlOwner scheduled_owner(std::uint64_t episode, std::uint64_t tick) const;
  /// Throws ConfigError (line 0) on inconsistent values.
  void validate() const;

  bool operator==(const SessionConfig&) const = default;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, std::string field, const std::string& what)
      : std::runtime_error((line ? "line " + std::to_string(line) + ": " : std::string()) +
                           (field.empty() ? std::string() : field + ": ") + what),
        line_(line),
        field_(std::move(field)) {}
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

/// Parses the sectioned key = value format written by format_config.
/// `#` starts a comment. The [session] env key is required.
SessionConfig parse_config(std::string_view text);
std::string format_config(const SessionConfig& cfg);

}  // namespace mre::session
