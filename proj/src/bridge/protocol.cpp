#include "mre/bridge/protocol.hpp"

#include "mre/io/json.hpp"

namespace mre::bridge {

namespace {

const char* pace_name(Pace p) { return p == Pace::Lockstep ? "lockstep" : "realtime"; }

Pace parse_pace(const std::string& s) {
  if (s == "realtime") return Pace::Realtime;
  if (s == "lockstep") return Pace::Lockstep;
  throw ProtocolError("unknown pace '" + s + "'");
}

session::ControlOwner parse_owner_field(const std::string& s) {
  const auto o = session::parse_owner(s);
  if (!o) throw ProtocolError("unknown owner '" + s + "'");
  return *o;
}

json schedule_json(const std::vector<session::ScheduleEntry>& sched) {
  json out = json::array();
  for (const auto& e : sched) {
    json o = {{"episode", e.episode}, {"owner", std::string(session::to_string(e.owner))}};
    if (e.first_tick) {
      o["first_tick"] = *e.first_tick;
      o["last_tick"] = *e.last_tick;
    }
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<session::ScheduleEntry> schedule_from_json(const json& j) {
  std::vector<session::ScheduleEntry> out;
  for (const auto& o : j) {
    session::ScheduleEntry e;
    e.episode = o.at("episode").get<std::uint64_t>();
    e.owner = parse_owner_field(o.at("owner").get<std::string>());
    if (o.contains("first_tick")) {
      e.first_tick = o.at("first_tick").get<std::uint64_t>();
      e.last_tick = o.at("last_tick").get<std::uint64_t>();
    }
    out.push_back(e);
  }
  return out;
}

constexpr InputMessage::Kind kAllKinds[] = {
    InputMessage::Kind::TakeoverOn, InputMessage::Kind::TakeoverOff, InputMessage::Kind::Key,
    InputMessage::Kind::Reset,      InputMessage::Kind::SaveModel,   InputMessage::Kind::SetConfig,
    InputMessage::Kind::Step,       InputMessage::Kind::Sync};

template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("bad field: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ProtocolError(e.what());
  }
}

}  // namespace

const char* to_string(InputMessage::Kind k) {
  switch (k) {
    case InputMessage::Kind::TakeoverOn: return "takeover_on";
    case InputMessage::Kind::TakeoverOff: return "takeover_off";
    case InputMessage::Kind::Key: return "key";
    case InputMessage::Kind::Reset: return "reset";
    case InputMessage::Kind::SaveModel: return "save_model";
    case InputMessage::Kind::SetConfig: return "set_config";
    case InputMessage::Kind::Step: return "step";
    case InputMessage::Kind::Sync: return "sync";
  }
  return "?";
}

session::SessionConfig JoinMessage::session_config(double tick_rate) const {
  session::SessionConfig c;
  c.env_id = env;
  c.seed = seed;
  c.tick_rate = tick_rate;
  c.ingest_on_release = ingest_on_release;
  c.max_order = max_order;
  c.max_level = max_level;
  c.min_match_level = min_match_level;
  c.baseline_episodes = baseline_episodes;
  c.teacher_episodes = teacher_episodes;
  c.eval_episodes = 0;
  c.schedule = schedule;
  return c;
}

json to_json(const ClientMessage& m) {
  if (const auto* j = std::get_if<JoinMessage>(&m)) {
    return {{"type", "join"},
            {"protocol_version", j->protocol_version},
            {"env", j->env},
            {"seed", j->seed},
            {"pace", pace_name(j->pace)},
            {"baseline_episodes", j->baseline_episodes},
            {"teacher_episodes", j->teacher_episodes},
            {"max_order", j->max_order},
            {"max_level", j->max_level},
            {"min_match_level", j->min_match_level},
            {"ingest_on_release", j->ingest_on_release},
            {"schedule", schedule_json(j->schedule)}};
  }
  const auto& in = std::get<InputMessage>(m);
  json o = {{"type", "input"}, {"kind", to_string(in.kind)}, {"client_tick", in.client_tick}};
  if (in.kind == InputMessage::Kind::Key) o["action"] = in.action;
  if (in.kind == InputMessage::Kind::Step) o["count"] = in.count;
  if (in.kind == InputMessage::Kind::SetConfig) {
    json c = json::object();
    if (in.config.min_match_level) c["min_match_level"] = *in.config.min_match_level;
    if (in.config.ingest_on_release) c["ingest_on_release"] = *in.config.ingest_on_release;
    if (in.config.tick_rate) c["tick_rate"] = *in.config.tick_rate;
    o["config"] = std::move(c);
  }
  return o;
}

ClientMessage parse_client_message(const json& j) {
  return guarded([&]() -> ClientMessage {
    if (!j.is_object() || !j.contains("type")) throw ProtocolError("message without type");
    const auto type = j.at("type").get<std::string>();
    if (type == "join") {
      JoinMessage m;
      m.protocol_version = j.value("protocol_version", kProtocolVersion);
      m.env = j.value("env", m.env);
      m.seed = j.value("seed", m.seed);
      m.pace = parse_pace(j.value("pace", std::string("realtime")));
      m.baseline_episodes = j.value("baseline_episodes", m.baseline_episodes);
      m.teacher_episodes = j.value("teacher_episodes", m.teacher_episodes);
      m.max_order = j.value("max_order", m.max_order);
      m.max_level = j.value("max_level", m.max_level);
      m.min_match_level = j.value("min_match_level", m.min_match_level);
      m.ingest_on_release = j.value("ingest_on_release", m.ingest_on_release);
      if (j.contains("schedule")) m.schedule = schedule_from_json(j.at("schedule"));
      return m;
    }
    if (type != "input") throw ProtocolError("unknown message type '" + type + "'");
    InputMessage in;
    const auto kind = j.at("kind").get<std::string>();
    bool known = false;
    for (auto k : kAllKinds) {
      if (kind == to_string(k)) {
        in.kind = k;
        known = true;
      }
    }
    if (!known) throw ProtocolError("unknown input kind '" + kind + "'");
    in.client_tick = j.value("client_tick", std::uint64_t{0});
    if (in.kind == InputMessage::Kind::Key) in.action = j.at("action").get<std::int64_t>();
    if (in.kind == InputMessage::Kind::Step) in.count = j.value("count", std::uint64_t{1});
    if (in.kind == InputMessage::Kind::SetConfig) {
      const json& c = j.at("config");
      if (c.contains("min_match_level")) in.config.min_match_level = c.at("min_match_level").get<int>();
      if (c.contains("ingest_on_release")) {
        in.config.ingest_on_release = c.at("ingest_on_release").get<bool>();
      }
      if (c.contains("tick_rate")) in.config.tick_rate = c.at("tick_rate").get<double>();
    }
    return in;
  });
}

json to_json(const ServerMessage& m) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, HelloMessage>) {
          return {{"type", "hello"},         {"protocol_version", v.protocol_version},
                  {"env", v.env},            {"tick_rate", v.tick_rate},
                  {"pace", pace_name(v.pace)}, {"session_seed", v.session_seed}};
        } else if constexpr (std::is_same_v<T, FrameMessage>) {
          return {{"type", "frame"},
                  {"episode", v.episode},
                  {"tick", v.tick},
                  {"owner", std::string(session::to_string(v.owner))},
                  {"render", io::to_json(v.render)},
                  {"obs", v.obs},
                  {"reward", v.reward},
                  {"competence", v.competence ? json(*v.competence) : json(nullptr)},
                  {"provenance", v.provenance ? io::to_json(*v.provenance) : json(nullptr)},
                  {"demonstrations", v.demonstrations},
                  {"done", v.done}};
        } else if constexpr (std::is_same_v<T, EpisodeEndMessage>) {
          return {{"type", "episode_end"}, {"metrics", io::to_json(v.metrics)}};
        } else if constexpr (std::is_same_v<T, ErrorMessage>) {
          return {{"type", "error"}, {"message", v.message}};
        } else if constexpr (std::is_same_v<T, SavedMessage>) {
          return {{"type", "saved"}, {"path", v.path}};
        } else {
          return {{"type", "sync"}, {"episode", v.episode}, {"ticks", v.ticks}};
        }
      },
      m);
}

ServerMessage parse_server_message(const json& j) {
  return guarded([&]() -> ServerMessage {
    if (!j.is_object() || !j.contains("type")) throw ProtocolError("message without type");
    const auto type = j.at("type").get<std::string>();
    if (type == "hello") {
      HelloMessage h;
      h.protocol_version = j.at("protocol_version").get<int>();
      h.env = j.at("env");
      h.tick_rate = j.at("tick_rate").get<double>();
      h.pace = parse_pace(j.at("pace").get<std::string>());
      h.session_seed = j.at("session_seed").get<std::uint64_t>();
      return h;
    }
    if (type == "frame") {
      FrameMessage f;
      f.episode = j.at("episode").get<std::uint64_t>();
      f.tick = j.at("tick").get<std::uint64_t>();
      f.owner = parse_owner_field(j.at("owner").get<std::string>());
      f.render = io::render_from_json(j.at("render"));
      f.obs = j.at("obs").get<Vec>();
      f.reward = j.at("reward").get<double>();
      if (!j.at("competence").is_null()) f.competence = j.at("competence").get<double>();
      if (!j.at("provenance").is_null()) f.provenance = io::provenance_from_json(j.at("provenance"));
      f.demonstrations = j.at("demonstrations").get<std::uint64_t>();
      f.done = j.at("done").get<bool>();
      return f;
    }
    if (type == "episode_end") return EpisodeEndMessage{io::metrics_from_json(j.at("metrics"))};
    if (type == "error") return ErrorMessage{j.at("message").get<std::string>()};
    if (type == "saved") return SavedMessage{j.at("path").get<std::string>()};
    if (type == "sync") {
      return SyncMessage{j.at("episode").get<std::uint64_t>(), j.at("ticks").get<std::uint64_t>()};
    }
    throw ProtocolError("unknown message type '" + type + "'");
  });
}

}  // namespace mre::bridge
