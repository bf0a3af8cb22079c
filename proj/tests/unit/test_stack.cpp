#include <doctest.h>

#include <thread>

#include "fixtures.hpp"
#include "mre/core/batch.hpp"
#include "mre/core/serialize.hpp"
#include "mre/core/stack.hpp"
#include "mre/core/stats.hpp"
#include "oracle.hpp"

using namespace mre;

namespace {

struct Setup {
  SpaceSpec os = fixtures::unit_obs(2);
  SpaceSpec as = fixtures::discrete_action(3);
  std::shared_ptr<const QuantizationSchema> schema = fixtures::schema(os, as, 3);
  DemonstrationStack stack{schema, 2, FallbackPolicy::uniform_random(as), 0};
};

Demonstration single(const Vec& obs, const Vec& action, std::uint64_t id) {
  Episode ep;
  ep.steps.push_back({1, obs, action, 0.0, ControlSource::Human});
  return demonstration_from_episode(ep, 2, id);
}

}  // namespace

TEST_CASE("empty stack falls back") {
  Setup s;
  Rng rng(0);
  const auto d = demo_stack_policy(s.stack, Vec{0.5, 0.5}, {}, rng);
  CHECK(std::holds_alternative<Fallback>(d.provenance));
  CHECK(s.stack.counters().fallbacks == 1);
}

TEST_CASE("latest demonstration takes precedence") {
  Setup s;
  s.stack.add_demonstration(single({0.3, 0.3}, {0}, 0));
  s.stack.add_demonstration(single({0.3, 0.3}, {2}, 1));
  CHECK(s.stack.size() == 2);
  Rng rng(0);
  for (int i = 0; i < 1000; ++i) {
    const auto d = demo_stack_policy(s.stack, Vec{0.3, 0.3}, {}, rng);
    CHECK(d.action == Vec{2.0});
    CHECK(d.match()->demo_index == 0);
  }
}

TEST_CASE("a newer ensemble matches first through its total level 0") {
  Setup s;
  s.stack.add_demonstration(single({0.9, 0.9}, {0}, 0));  // covers Y exactly
  s.stack.add_demonstration(single({0.1, 0.1}, {2}, 1));  // silent on Y
  Rng rng(0);
  const Vec y{0.9, 0.9};
  const auto d = demo_stack_policy(s.stack, y, {}, rng);
  CHECK(d.action == Vec{2.0});
  CHECK(d.provenance == Provenance{Matched{0, 0, 0}});

  const std::vector<Demonstration> newest_first{single({0.1, 0.1}, {2}, 1), single({0.9, 0.9}, {0}, 0)};
  const auto r = oracle::scan_stack(newest_first, y, {}, s.os, s.as, 2, 3, 0);
  REQUIRE(r);
  CHECK(r->demo_index == 0);
  CHECK(r->match.level == 0);
}

TEST_CASE("consultation order is reverse insertion order") {
  Setup s;
  for (std::uint64_t k = 0; k < 5; ++k) s.stack.add_demonstration(single({0.5, 0.5}, {0}, k));
  const auto snap = s.stack.snapshot();
  for (std::size_t i = 0; i < 5; ++i) CHECK((*snap)[i]->source_id() == 4 - i);
}

TEST_CASE("stack rejects ensembles of another shape") {
  Setup s;
  const auto other = fixtures::schema(s.os, s.as, 2);
  Rng rng(1);
  auto e = std::make_shared<const MarkovEnsemble>(
      build_ensemble(fixtures::random_demo(s.os, s.as, 5, 2, rng), 2, other));
  CHECK_THROWS_AS(s.stack.push(e), std::invalid_argument);
  auto e3 = std::make_shared<const MarkovEnsemble>(
      build_ensemble(fixtures::random_demo(s.os, s.as, 5, 1, rng), 1, s.schema));
  CHECK_THROWS_AS(s.stack.push(e3), std::invalid_argument);
}

TEST_CASE("lookups grow at most linearly with the stack") {
  Setup s;
  Rng rng(99);
  const auto queries = random_queries(*s.schema, 2, 500, 1);
  auto total = [&] {
    std::uint64_t n = 0;
    for (const auto& q : queries) {
      Rng r(q.seed);
      n += demo_stack_policy(s.stack, q.obs, q.history, r).lookups;
    }
    return n;
  };
  s.stack.add_demonstration(fixtures::random_demo(s.os, s.as, 40, 2, rng));
  const auto one = total();
  for (int k = 1; k < 50; ++k) s.stack.add_demonstration(fixtures::random_demo(s.os, s.as, 40, 2, rng, k));
  const auto fifty = total();
  CHECK(fifty <= 50 * one);
  for (const auto& q : queries) {
    Rng r(q.seed);
    CHECK(demo_stack_policy(s.stack, q.obs, q.history, r).lookups <= 50u * 3u * 4u);
  }
}

TEST_CASE("stack policy agrees with the brute-force scan") {
  Setup s;
  Rng rng(31);
  std::vector<Demonstration> newest_first;
  for (int k = 0; k < 4; ++k) {
    auto d = fixtures::random_demo(s.os, s.as, 1 + rng.below(20), 2, rng, k);
    s.stack.add_demonstration(d);
    newest_first.insert(newest_first.begin(), d);
  }
  for (int min_level = 0; min_level <= 3; ++min_level) {
    s.stack.set_min_match_level(min_level);
    for (int i = 0; i < 200; ++i) {
      const Vec o = fixtures::random_point(s.os, rng);
      const auto h = fixtures::random_history(s.as, rng.below(3), rng);
      const auto d = demo_stack_policy(s.stack, o, h, rng);
      const auto r = oracle::scan_stack(newest_first, o, h, s.os, s.as, 2, 3, min_level);
      REQUIRE(d.matched() == r.has_value());
      if (r) {
        CHECK(d.match()->demo_index == r->demo_index);
        CHECK(d.match()->order == r->match.order);
        CHECK(d.match()->level == r->match.level);
        CHECK(oracle::contains(r->match.actions, d.action));
      }
    }
  }
}

TEST_CASE("concurrent readers see consistent snapshots while a writer adds") {
  Setup s;
  Rng rng(5);
  s.stack.add_demonstration(fixtures::random_demo(s.os, s.as, 10, 2, rng));
  std::atomic<bool> stop{false};
  std::atomic<int> failures{0};
  std::thread reader([&] {
    Rng r(1);
    while (!stop) {
      const auto d = demo_stack_policy(s.stack, Vec{0.2, 0.7}, {}, r);
      if (!d.matched()) ++failures;
    }
  });
  for (int k = 1; k < 50; ++k) s.stack.add_demonstration(fixtures::random_demo(s.os, s.as, 10, 2, rng, k));
  stop = true;
  reader.join();
  CHECK(failures == 0);
  CHECK(s.stack.size() == 50);
}

TEST_CASE("batch decisions match the serial reference") {
  Setup s;
  Rng rng(17);
  for (int k = 0; k < 10; ++k) s.stack.add_demonstration(fixtures::random_demo(s.os, s.as, 50, 2, rng, k));
  const auto qs = random_queries(*s.schema, 2, 2000, 3);
  const auto a = decide_batch(s.stack, qs);
  const auto b = decide_batch_serial(s.stack, qs);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].action == b[i].action);
    CHECK(a[i].provenance == b[i].provenance);
    CHECK(a[i].lookups == b[i].lookups);
  }
}

TEST_CASE("serialization round trips") {
  Setup s;
  SUBCASE("empty stack") {
    const auto back = deserialize_stack(serialize_stack(s.stack));
    CHECK(back.size() == 0);
    CHECK(back.schema() == *s.schema);
    CHECK(back.max_order() == 2);
  }
  SUBCASE("three ensembles replay the same decisions") {
    Rng rng(2);
    for (int k = 0; k < 3; ++k) s.stack.add_demonstration(fixtures::random_demo(s.os, s.as, 30, 2, rng, k));
    const auto bytes = serialize_stack(s.stack);
    const auto back = deserialize_stack(bytes);
    CHECK(serialize_stack(back) == bytes);
    const auto qs = random_queries(*s.schema, 2, 1000, 9);
    for (const auto& q : qs) {
      Rng r1(q.seed), r2(q.seed);
      const auto a = demo_stack_policy(s.stack, q.obs, q.history, r1);
      const auto b = demo_stack_policy(back, q.obs, q.history, r2);
      CHECK(a.action == b.action);
      CHECK(a.provenance == b.provenance);
    }
  }
}

TEST_CASE("corrupted model files raise format errors") {
  Setup s;
  Rng rng(2);
  s.stack.add_demonstration(fixtures::random_demo(s.os, s.as, 30, 2, rng));
  const auto good = serialize_stack(s.stack);

  auto bad = good;
  bad[0] = 'X';
  CHECK_THROWS_AS(deserialize_stack(bad), FormatError);

  auto with_crc = [](std::vector<std::uint8_t> c) {
    const std::uint32_t crc = crc32_of(std::span(c).first(c.size() - 4));
    for (int b = 0; b < 4; ++b) c[c.size() - 4 + b] = static_cast<std::uint8_t>(crc >> (8 * b));
    return c;
  };

  // The header of an empty stack ends where the first section length starts.
  const std::size_t len_at = serialize_stack(Setup{}.stack).size() - 4;
  bad = good;
  bad[len_at + 3] = 0x7f;
  CHECK_THROWS_AS(deserialize_stack(with_crc(bad)), FormatError);
  bad = good;
  bad[len_at] ^= 0x01;
  try {
    (void)deserialize_stack(with_crc(bad));
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(e.offset() == len_at);
  }

  bad = good;
  bad[bad.size() / 3] ^= 0x5a;
  CHECK_THROWS_AS(deserialize_stack(bad), FormatError);

  for (std::size_t cut : {std::size_t{0}, std::size_t{3}, good.size() / 2, good.size() - 1}) {
    std::vector<std::uint8_t> t(good.begin(), good.begin() + static_cast<std::ptrdiff_t>(cut));
    CHECK_THROWS_AS(deserialize_stack(t), FormatError);
  }

  // Random corruption with a recomputed checksum never crashes.
  for (int i = 0; i < 300; ++i) {
    auto c = good;
    c[rng.below(c.size() - 4)] = static_cast<std::uint8_t>(rng.below(256));
    c = with_crc(c);
    try {
      (void)deserialize_stack(c);
    } catch (const FormatError&) {
    } catch (const std::invalid_argument&) {
    }
  }
}

TEST_CASE("stack statistics") {
  Setup s;
  const StackStats empty = stack_stats(s.stack);
  CHECK(empty.ensembles == 0);
  CHECK(empty.keys == 0);
  CHECK(empty.stored_actions == 0);

  const auto schema = fixtures::schema(fixtures::unit_obs(1), fixtures::discrete_action(2), 1);
  DemonstrationStack st(schema, 1, FallbackPolicy::uniform_random(fixtures::discrete_action(2)));
  Episode ep;
  for (std::uint64_t t = 1; t <= 3; ++t) ep.steps.push_back({t, {0.3 * t}, {0}, 0.0, ControlSource::Human});
  st.add_demonstration(demonstration_from_episode(ep, 1));
  const StackStats one = stack_stats(st);
  CHECK(one.stored_actions == 10);
  CHECK(one.stored_actions == oracle::insertions(3, 1, 1));
  CHECK(one.transitions == 3);
  CHECK(to_key_value(one).find("stored_actions=10") != std::string::npos);

  Rng rng(0);
  StackCounters prev = st.counters();
  for (int i = 0; i < 50; ++i) {
    (void)demo_stack_policy(st, Vec{rng.uniform()}, {}, rng);
    const StackCounters now = st.counters();
    CHECK(now.queries > prev.queries);
    CHECK(now.lookups >= prev.lookups);
    CHECK(now.matched >= prev.matched);
    prev = now;
  }
}
