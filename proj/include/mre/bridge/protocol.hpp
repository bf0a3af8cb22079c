#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mre/bridge/wire.hpp"
#include "mre/core/policy.hpp"
#include "mre/envs/environment.hpp"
#include "mre/session/config.hpp"
#include "mre/session/session.hpp"

namespace mre::bridge {

inline constexpr int kProtocolVersion = 1;

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Pace { Realtime, Lockstep };

// ---- client -> server ----

/// First client message; carries the session parameters.
struct JoinMessage {
  int protocol_version = kProtocolVersion;
  std::string env = "mountain_car";
  std::uint64_t seed = 0;
  Pace pace = Pace::Realtime;
  std::uint64_t baseline_episodes = 10;
  std::uint64_t teacher_episodes = 0;
  int max_order = 3;
  int max_level = 4;
  int min_match_level = 1;
  bool ingest_on_release = true;
  std::vector<session::ScheduleEntry> schedule;
  bool operator==(const JoinMessage&) const = default;

  session::SessionConfig session_config(double tick_rate) const;
};

struct ConfigPatch {
  std::optional<int> min_match_level;
  std::optional<bool> ingest_on_release;
  std::optional<double> tick_rate;
  bool operator==(const ConfigPatch&) const = default;
};

struct InputMessage {
  enum class Kind { TakeoverOn, TakeoverOff, Key, Reset, SaveModel, SetConfig, Step, Sync };
  Kind kind = Kind::Sync;
  std::uint64_t client_tick = 0;
  std::int64_t action = 0;  // Key
  std::uint64_t count = 1;  // Step (lockstep pace)
  ConfigPatch config;       // SetConfig
  bool operator==(const InputMessage&) const = default;
};

// ---- server -> client ----

struct HelloMessage {
  int protocol_version = kProtocolVersion;
  json env;  // EnvSpec document
  double tick_rate = 30.0;
  Pace pace = Pace::Realtime;
  std::uint64_t session_seed = 0;
  bool operator==(const HelloMessage&) const = default;
};

struct FrameMessage {
  std::uint64_t episode = 0;
  std::uint64_t tick = 0;
  session::ControlOwner owner = session::ControlOwner::Policy;
  envs::RenderFrame render;
  Vec obs;
  double reward = 0.0;                  // episode reward so far
  std::optional<double> competence;     // running, policy ticks only
  std::optional<Provenance> provenance; // last policy decision this episode
  std::uint64_t demonstrations = 0;     // ensembles in the stack
  bool done = false;
  bool operator==(const FrameMessage&) const = default;
};

struct EpisodeEndMessage {
  session::EpisodeMetrics metrics;
  bool operator==(const EpisodeEndMessage&) const = default;
};

struct ErrorMessage {
  std::string message;
  bool operator==(const ErrorMessage&) const = default;
};

struct SavedMessage {
  std::string path;
  bool operator==(const SavedMessage&) const = default;
};

struct SyncMessage {
  std::uint64_t episode = 0;
  std::uint64_t ticks = 0;  // ticks executed so far in this session
  bool operator==(const SyncMessage&) const = default;
};

using ClientMessage = std::variant<JoinMessage, InputMessage>;
using ServerMessage =
    std::variant<HelloMessage, FrameMessage, EpisodeEndMessage, ErrorMessage, SavedMessage, SyncMessage>;

json to_json(const ClientMessage& m);
json to_json(const ServerMessage& m);

/// Unknown fields are ignored; unknown message types or input kinds and
/// ill-typed fields throw ProtocolError.
ClientMessage parse_client_message(const json& j);
ServerMessage parse_server_message(const json& j);

const char* to_string(InputMessage::Kind k);

}  // namespace mre::bridge
