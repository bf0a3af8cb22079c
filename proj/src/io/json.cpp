#include "mre/io/json.hpp"

#include <stdexcept>

namespace mre::io {

json to_json(const SpaceSpec& s) {
  json dims = json::array();
  for (const auto& d : s.dims()) {
    if (const auto* c = std::get_if<ContinuousDim>(&d)) {
      dims.push_back({{"kind", "continuous"}, {"min", c->min}, {"max", c->max}});
    } else {
      dims.push_back({{"kind", "discrete"}, {"cardinality", std::get<DiscreteDim>(d).cardinality}});
    }
  }
  return {{"dims", dims}};
}

SpaceSpec space_from_json(const json& j) {
  try {
    std::vector<DimSpec> dims;
    for (const auto& d : j.at("dims")) {
      const auto kind = d.at("kind").get<std::string>();
      if (kind == "continuous") {
        dims.emplace_back(ContinuousDim{d.at("min").get<double>(), d.at("max").get<double>()});
      } else if (kind == "discrete") {
        dims.emplace_back(DiscreteDim{d.at("cardinality").get<std::int64_t>()});
      } else {
        throw std::invalid_argument("unknown dimension kind '" + kind + "'");
      }
    }
    return SpaceSpec(std::move(dims));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("space spec: ") + e.what());
  }
}

json to_json(const Provenance& p) {
  if (const auto* m = std::get_if<Matched>(&p)) {
    return {{"kind", "matched"}, {"demo", m->demo_index}, {"order", m->order}, {"level", m->level}};
  }
  return {{"kind", "fallback"}};
}

Provenance provenance_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "fallback") return Fallback{};
  if (kind != "matched") throw std::invalid_argument("unknown provenance kind '" + kind + "'");
  return Matched{j.at("demo").get<std::size_t>(), j.at("order").get<int>(), j.at("level").get<int>()};
}

json to_json(const envs::RenderFrame& f) {
  json shapes = json::array();
  for (const auto& s : f.shapes) {
    json o = {{"kind", envs::to_string(s.kind)}, {"points", s.points}, {"color", s.color}};
    if (s.kind == envs::Shape::Kind::Circle) o["radius"] = s.radius;
    if (s.kind == envs::Shape::Kind::Text) o["text"] = s.text;
    shapes.push_back(std::move(o));
  }
  return {{"version", f.version}, {"shapes", shapes}};
}

envs::RenderFrame render_from_json(const json& j) {
  envs::RenderFrame f;
  f.version = j.at("version").get<int>();
  for (const auto& o : j.at("shapes")) {
    envs::Shape s;
    const auto kind = o.at("kind").get<std::string>();
    if (kind == "line") s.kind = envs::Shape::Kind::Line;
    else if (kind == "circle") s.kind = envs::Shape::Kind::Circle;
    else if (kind == "polygon") s.kind = envs::Shape::Kind::Polygon;
    else if (kind == "text") s.kind = envs::Shape::Kind::Text;
    else throw std::invalid_argument("unknown shape kind '" + kind + "'");
    s.points = o.at("points").get<std::vector<std::array<double, 2>>>();
    s.color = o.value("color", std::string("#ffffff"));
    s.radius = o.value("radius", 0.0);
    s.text = o.value("text", std::string());
    f.shapes.push_back(std::move(s));
  }
  return f;
}

json to_json(const envs::EnvSpec& s) {
  return {{"id", s.id},
          {"observation", to_json(s.observation)},
          {"action", to_json(s.action)},
          {"max_steps", s.max_steps},
          {"solve_predicate", s.solve_predicate},
          {"action_names", s.action_names},
          {"idle_action", s.idle_action}};
}

json to_json(const session::EpisodeMetrics& m) {
  return {{"episode", m.episode},
          {"reward", m.reward},
          {"solved", m.solved},
          {"terminal", std::string(to_string(m.terminal))},
          {"steps", m.steps},
          {"policy_ticks", m.policy_ticks},
          {"matched_ticks", m.matched_ticks},
          {"competence", m.competence ? json(*m.competence) : json(nullptr)},
          {"demo_steps", m.demo_steps},
          {"good_actions", m.good_actions},
          {"bad_actions", m.bad_actions}};
}

session::EpisodeMetrics metrics_from_json(const json& j) {
  session::EpisodeMetrics m;
  m.episode = j.at("episode").get<std::uint64_t>();
  m.reward = j.at("reward").get<double>();
  m.solved = j.at("solved").get<bool>();
  const auto t = j.at("terminal").get<std::string>();
  m.terminal = t == "solved" ? Terminal::Solved : t == "failed" ? Terminal::Failed : Terminal::Truncated;
  m.steps = j.at("steps").get<std::uint64_t>();
  m.policy_ticks = j.at("policy_ticks").get<std::uint64_t>();
  m.matched_ticks = j.at("matched_ticks").get<std::uint64_t>();
  if (!j.at("competence").is_null()) m.competence = j.at("competence").get<double>();
  m.demo_steps = j.at("demo_steps").get<std::uint64_t>();
  m.good_actions = j.at("good_actions").get<std::uint64_t>();
  m.bad_actions = j.at("bad_actions").get<std::uint64_t>();
  return m;
}

}  // namespace mre::io
