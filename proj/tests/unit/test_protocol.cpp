#include <doctest.h>

#include "mre/bridge/protocol.hpp"
#include "mre/envs/environment.hpp"
#include "mre/io/json.hpp"

using namespace mre;
using namespace mre::bridge;

namespace {

template <class M>
M client_round_trip(const M& m) {
  const std::string bytes = encode_message(to_json(ClientMessage{m}));
  MessageDecoder d;
  d.feed(bytes);
  auto item = d.next();
  REQUIRE(item);
  return std::get<M>(parse_client_message(std::get<json>(*item)));
}

template <class M>
M server_round_trip(const M& m) {
  const std::string bytes = encode_message(to_json(ServerMessage{m}));
  MessageDecoder d;
  d.feed(bytes);
  auto item = d.next();
  REQUIRE(item);
  return std::get<M>(parse_server_message(std::get<json>(*item)));
}

}  // namespace

TEST_CASE("wire framing") {
  CHECK(encode_message(json{{"type", "sync"}}) == "15\n{\"type\":\"sync\"}");
  MessageDecoder d;
  const std::string two = encode_message(json{{"a", 1}}) + encode_message(json{{"b", 2}});
  for (char c : two) d.feed(std::string_view(&c, 1));  // byte at a time
  auto a = d.next();
  auto b = d.next();
  REQUIRE(a);
  REQUIRE(b);
  CHECK(std::get<json>(*a)["a"] == 1);
  CHECK(std::get<json>(*b)["b"] == 2);
  CHECK(!d.next());
}

TEST_CASE("decoder recovers from garbage") {
  MessageDecoder d;
  d.feed("hello\n");
  d.feed("5\n{oops");
  d.feed("2\n[]");
  d.feed(encode_message(json{{"type", "sync"}}));
  int errors = 0;
  bool good = false;
  while (auto item = d.next()) {
    if (std::holds_alternative<DecodeError>(*item)) ++errors;
    else good = std::get<json>(*item)["type"] == "sync";
  }
  CHECK(errors == 3);
  CHECK(good);

  MessageDecoder big;
  big.feed(std::to_string(kMaxMessageBytes + 1) + "\n");
  auto e = big.next();
  REQUIRE(e);
  CHECK(std::holds_alternative<DecodeError>(*e));
}

TEST_CASE("decoder never crashes on random bytes") {
  Rng rng(6);
  for (int trial = 0; trial < 500; ++trial) {
    MessageDecoder d;
    std::string s;
    const auto n = rng.below(200);
    for (std::uint64_t i = 0; i < n; ++i) {
      const char alphabet[] = "0123456789\n{}\":,abc ";
      s += rng.below(3) ? alphabet[rng.below(sizeof alphabet - 1)] : static_cast<char>(rng.below(256));
    }
    d.feed(s);
    int guard = 0;
    while (d.next() && ++guard < 1000) {
    }
    CHECK(guard < 1000);
  }
}

TEST_CASE("every client message round trips") {
  JoinMessage j;
  j.env = "lander";
  j.seed = 42;
  j.pace = Pace::Lockstep;
  j.baseline_episodes = 0;
  j.teacher_episodes = 2;
  j.max_order = 2;
  j.min_match_level = 0;
  j.ingest_on_release = false;
  j.schedule.push_back({3, session::ControlOwner::Teacher, 5, 9});
  CHECK(client_round_trip(j) == j);

  using K = InputMessage::Kind;
  for (K k : {K::TakeoverOn, K::TakeoverOff, K::Key, K::Reset, K::SaveModel, K::SetConfig, K::Step, K::Sync}) {
    InputMessage in;
    in.kind = k;
    in.client_tick = 17;
    if (k == K::Key) in.action = 2;
    if (k == K::Step) in.count = 5;
    if (k == K::SetConfig) in.config = {2, true, 60.0};
    CHECK(client_round_trip(in) == in);
  }
}

TEST_CASE("every server message round trips") {
  auto env = envs::make_env("mountain_car");
  env->reset(3);
  HelloMessage h;
  h.env = io::to_json(env->spec());
  h.pace = Pace::Lockstep;
  h.session_seed = 8;
  CHECK(server_round_trip(h) == h);

  FrameMessage f;
  f.episode = 2;
  f.tick = 31;
  f.owner = session::ControlOwner::Human;
  f.render = env->render();
  f.obs = env->observation();
  f.reward = -31.0;
  f.competence = 0.75;
  f.provenance = Matched{1, 2, 3};
  f.demonstrations = 4;
  CHECK(server_round_trip(f) == f);
  f.competence.reset();
  f.provenance = Fallback{};
  f.done = true;
  CHECK(server_round_trip(f) == f);
  f.provenance.reset();
  CHECK(server_round_trip(f) == f);

  session::EpisodeMetrics m;
  m.episode = 9;
  m.reward = -110.25;
  m.solved = true;
  m.terminal = Terminal::Solved;
  m.steps = 110;
  m.policy_ticks = 100;
  m.matched_ticks = 95;
  m.competence = 0.95;
  m.demo_steps = 10;
  m.good_actions = 80;
  m.bad_actions = 3;
  CHECK(server_round_trip(EpisodeEndMessage{m}) == EpisodeEndMessage{m});
  CHECK(server_round_trip(ErrorMessage{"bad"}) == ErrorMessage{"bad"});
  CHECK(server_round_trip(SavedMessage{"/tmp/x.mrme"}) == SavedMessage{"/tmp/x.mrme"});
  CHECK(server_round_trip(SyncMessage{3, 400}) == SyncMessage{3, 400});
}

TEST_CASE("unknown fields are ignored; unknown types and kinds are rejected") {
  json j = to_json(ClientMessage{InputMessage{InputMessage::Kind::Key, 1, 2, 1, {}}});
  j["future_field"] = {1, 2, 3};
  CHECK(std::get<InputMessage>(parse_client_message(j)).action == 2);

  json k = j;
  k["kind"] = "teleport";
  CHECK_THROWS_AS(parse_client_message(k), ProtocolError);
  CHECK_THROWS_AS(parse_client_message(json{{"type", "dance"}}), ProtocolError);
  CHECK_THROWS_AS(parse_client_message(json{{"kind", "key"}}), ProtocolError);
  json bad = j;
  bad["action"] = "left";
  CHECK_THROWS_AS(parse_client_message(bad), ProtocolError);

  json s = to_json(ServerMessage{SyncMessage{1, 2}});
  s["extra"] = "x";
  CHECK(std::get<SyncMessage>(parse_server_message(s)) == SyncMessage{1, 2});
}
