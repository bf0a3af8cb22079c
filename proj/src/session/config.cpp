#include "mre/session/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "mre/envs/environment.hpp"

namespace mre::session {

std::string_view to_string(ControlOwner o) {
  switch (o) {
    case ControlOwner::Policy: return "policy";
    case ControlOwner::Human: return "human";
    case ControlOwner::Teacher: return "teacher";
    case ControlOwner::RandomBaseline: return "random";
  }
  return "?";
}

std::optional<ControlOwner> parse_owner(std::string_view s) {
  for (auto o : {ControlOwner::Policy, ControlOwner::Human, ControlOwner::Teacher,
                 ControlOwner::RandomBaseline}) {
    if (to_string(o) == s) return o;
  }
  return std::nullopt;
}

ControlOwner SessionConfig::scheduled_owner(std::uint64_t episode, std::uint64_t tick) const {
  ControlOwner owner = episode < baseline_episodes ? ControlOwner::RandomBaseline
                       : episode < baseline_episodes + teacher_episodes ? ControlOwner::Teacher
                                                                        : ControlOwner::Policy;
  for (const auto& e : schedule) {
    if (e.episode != episode) continue;
    if (!e.first_tick) {
      owner = e.owner;
    } else if (tick >= *e.first_tick && tick < *e.last_tick) {
      return e.owner;
    }
  }
  return owner;
}

void SessionConfig::validate() const {
  const auto ids = envs::env_ids();
  if (std::find(ids.begin(), ids.end(), env_id) == ids.end()) {
    throw ConfigError(0, "env", "unknown environment '" + env_id + "'");
  }
  if (!(tick_rate > 0.0) || !std::isfinite(tick_rate)) {
    throw ConfigError(0, "tick_rate", "must be positive");
  }
  if (max_order < 0 || max_order > 255) throw ConfigError(0, "max_order", "must be in [0, 255]");
  if (max_level < 0 || max_level > 40) throw ConfigError(0, "max_level", "must be in [0, 40]");
  if (min_match_level < 0 || min_match_level > max_level) {
    throw ConfigError(0, "min_match_level", "must be in [0, max_level]");
  }
  if (fallback != "uniform" && fallback != "idle") {
    throw ConfigError(0, "fallback", "must be 'uniform' or 'idle'");
  }
  for (const auto& e : schedule) {
    if (e.owner == ControlOwner::Human) {
      throw ConfigError(0, "schedule", "human control cannot be scheduled");
    }
    if (e.first_tick && (!e.last_tick || *e.last_tick <= *e.first_tick)) {
      throw ConfigError(0, "schedule", "tick range must be non-empty");
    }
  }
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view v, std::size_t line, const std::string& field) {
  T out{};
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) {
    throw ConfigError(line, field, "invalid number '" + std::string(v) + "'");
  }
  return out;
}

double parse_double(std::string_view v, std::size_t line, const std::string& field) {
  try {
    std::size_t used = 0;
    const std::string s(v);
    const double d = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw ConfigError(line, field, "invalid number '" + std::string(v) + "'");
  }
}

bool parse_bool(std::string_view v, std::size_t line, const std::string& field) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(line, field, "expected a boolean, got '" + std::string(v) + "'");
}

// "owner" or "owner@first-last"
ScheduleEntry parse_entry(std::uint64_t episode, std::string_view v, std::size_t line,
                          const std::string& field) {
  ScheduleEntry e;
  e.episode = episode;
  const auto at = v.find('@');
  const auto owner = parse_owner(trim(v.substr(0, at)));
  if (!owner) throw ConfigError(line, field, "unknown owner '" + std::string(v.substr(0, at)) + "'");
  e.owner = *owner;
  if (at != std::string_view::npos) {
    const auto range = trim(v.substr(at + 1));
    const auto dash = range.find('-');
    if (dash == std::string_view::npos) throw ConfigError(line, field, "tick range needs first-last");
    e.first_tick = parse_number<std::uint64_t>(trim(range.substr(0, dash)), line, field);
    e.last_tick = parse_number<std::uint64_t>(trim(range.substr(dash + 1)), line, field);
  }
  return e;
}

}  // namespace

SessionConfig parse_config(std::string_view text) {
  SessionConfig cfg;
  cfg.env_id.clear();
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool env_seen = false;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "", "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section != "session" && section != "model" && section != "schedule" &&
          section != "output") {
        throw ConfigError(line_no, section, "unknown section");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "", "expected key = value");
    if (section.empty()) throw ConfigError(line_no, "", "key outside of a section");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const std::string field = section + "." + key;
    if (section == "session") {
      if (key == "env") {
        cfg.env_id = std::string(value);
        env_seen = true;
      } else if (key == "seed") {
        cfg.seed = parse_number<std::uint64_t>(value, line_no, field);
      } else if (key == "tick_rate") {
        cfg.tick_rate = parse_double(value, line_no, field);
      } else if (key == "ingest_on_release") {
        cfg.ingest_on_release = parse_bool(value, line_no, field);
      } else {
        throw ConfigError(line_no, field, "unknown key");
      }
    } else if (section == "model") {
      if (key == "max_order") {
        cfg.max_order = parse_number<int>(value, line_no, field);
      } else if (key == "max_level") {
        cfg.max_level = parse_number<int>(value, line_no, field);
      } else if (key == "min_match_level") {
        cfg.min_match_level = parse_number<int>(value, line_no, field);
      } else if (key == "fallback") {
        cfg.fallback = std::string(value);
      } else {
        throw ConfigError(line_no, field, "unknown key");
      }
    } else if (section == "schedule") {
      if (key == "baseline_episodes") {
        cfg.baseline_episodes = parse_number<std::uint64_t>(value, line_no, field);
      } else if (key == "teacher_episodes") {
        cfg.teacher_episodes = parse_number<std::uint64_t>(value, line_no, field);
      } else if (key == "eval_episodes") {
        cfg.eval_episodes = parse_number<std::uint64_t>(value, line_no, field);
      } else if (key.rfind("episode.", 0) == 0) {
        const auto ep = parse_number<std::uint64_t>(std::string_view(key).substr(8), line_no, field);
        cfg.schedule.push_back(parse_entry(ep, value, line_no, field));
      } else {
        throw ConfigError(line_no, field, "unknown key");
      }
    } else if (section == "output") {
      if (key == "save_model") {
        cfg.save_model = parse_bool(value, line_no, field);
      } else {
        throw ConfigError(line_no, field, "unknown key");
      }
    }
  }
  if (!env_seen || cfg.env_id.empty()) throw ConfigError(0, "session.env", "missing environment id");
  cfg.validate();
  return cfg;
}

std::string format_config(const SessionConfig& c) {
  std::ostringstream o;
  o << "[session]\n"
    << "env = " << c.env_id << "\n"
    << "seed = " << c.seed << "\n"
    << "tick_rate = " << c.tick_rate << "\n"
    << "ingest_on_release = " << (c.ingest_on_release ? "true" : "false") << "\n\n"
    << "[model]\n"
    << "max_order = " << c.max_order << "\n"
    << "max_level = " << c.max_level << "\n"
    << "min_match_level = " << c.min_match_level << "\n"
    << "fallback = " << c.fallback << "\n\n"
    << "[schedule]\n"
    << "baseline_episodes = " << c.baseline_episodes << "\n"
    << "teacher_episodes = " << c.teacher_episodes << "\n"
    << "eval_episodes = " << c.eval_episodes << "\n";
  for (const auto& e : c.schedule) {
    o << "episode." << e.episode << " = " << to_string(e.owner);
    if (e.first_tick) o << "@" << *e.first_tick << "-" << *e.last_tick;
    o << "\n";
  }
  o << "\n[output]\n"
    << "save_model = " << (c.save_model ? "true" : "false") << "\n";
  return o.str();
}

}  // namespace mre::session
