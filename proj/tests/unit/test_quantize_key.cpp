#include <doctest.h>

#include "fixtures.hpp"
#include "mre/core/key.hpp"
#include "mre/core/quantize.hpp"
#include "oracle.hpp"

using namespace mre;

TEST_CASE("uniform_quantize floors toward negative infinity") {
  CHECK(uniform_quantize(3.7, 2.0) == Quantized{1, 2.0});
  CHECK(uniform_quantize(0.0, 0.5) == Quantized{0, 0.0});
  CHECK(uniform_quantize(-0.3, 0.5) == Quantized{-1, -0.5});
  CHECK_THROWS_AS(uniform_quantize(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(uniform_quantize(std::nan(""), 1.0), std::invalid_argument);
}

TEST_CASE("quantize property: value <= x < value + step") {
  Rng rng(11);
  for (int i = 0; i < 10000; ++i) {
    const double x = rng.uniform(-1e3, 1e3);
    const double step = rng.uniform(1e-3, 10.0);
    const Quantized q = uniform_quantize(x, step);
    CHECK(q.value <= x);
    CHECK(x < q.value + step * (1 + 1e-12));
  }
}

TEST_CASE("schema validation") {
  const SpaceSpec obs({ContinuousDim{0.0, 2.0}});
  const SpaceSpec act({DiscreteDim{3}});
  CHECK_NOTHROW(QuantizationSchema(obs, act, {{2.0, 0.5}}, {{}}));
  CHECK_THROWS_AS(QuantizationSchema(obs, act, {{1.0, 0.5}}, {{}}), std::invalid_argument);
  CHECK_THROWS_AS(QuantizationSchema(obs, act, {{2.0, 0.75}}, {{}}), std::invalid_argument);
  CHECK_THROWS_AS(QuantizationSchema(obs, act, {{2.0, 0.5}}, {{1.0}}), std::invalid_argument);
  const SpaceSpec two({ContinuousDim{0.0, 2.0}, ContinuousDim{0.0, 1.0}});
  CHECK_THROWS_AS(QuantizationSchema(two, act, {{2.0, 0.5}, {1.0}}, {{}}), std::invalid_argument);
}

TEST_CASE("encode_key on a two-level schema") {
  const SpaceSpec obs({ContinuousDim{0.0, 2.0}});
  const SpaceSpec act({DiscreteDim{3}});
  const QuantizationSchema q(obs, act, {{2.0, 0.5}}, {{}});
  const Vec o{0.9};

  const DecodedKey k1 = decode_key(encode_key(o, {}, q, 1), q);
  CHECK(k1.order == 0);
  CHECK(k1.level == 1);
  CHECK(k1.obs_bins == std::vector<std::int64_t>{1});

  const DecodedKey k0 = decode_key(encode_key(o, {}, q, 0), q);
  CHECK(k0.obs_bins == std::vector<std::int64_t>{0});

  const std::vector<Vec> h{{2.0}};
  // order 1, level 1, obs bin floor(0.9 / 0.5) = 1, action bin 2
  const std::string expected{"\x01\x01\x01\0\0\0\0\0\0\0\x02\0\0\0\0\0\0\0", 18};
  CHECK(encode_key(o, h, q, 1) == expected);
}

TEST_CASE("encode_key agrees with the concatenation encoder") {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t dims = 1 + rng.below(4);
    std::vector<DimSpec> od;
    for (std::size_t d = 0; d < dims; ++d) {
      if (rng.below(4) == 0) {
        od.push_back(DiscreteDim{static_cast<std::int64_t>(1 + rng.below(6))});
      } else {
        const double lo = rng.uniform(-10.0, 10.0);
        od.push_back(ContinuousDim{lo, lo + rng.uniform(0.1, 20.0)});
      }
    }
    const SpaceSpec os(od);
    const SpaceSpec as = rng.below(2) ? SpaceSpec({DiscreteDim{4}})
                                      : SpaceSpec({ContinuousDim{-1.0, 1.0}, DiscreteDim{2}});
    const int k = static_cast<int>(rng.below(6));
    const auto q = QuantizationSchema::halving(os, as, k);
    const Vec o = fixtures::random_point(os, rng);
    const auto h = fixtures::random_history(as, rng.below(4), rng);
    const int level = static_cast<int>(rng.below(static_cast<std::uint64_t>(k + 1)));
    REQUIRE(encode_key(o, h, q, level) == oracle::key(o, h, os, as, level));
  }
}

TEST_CASE("keys are injective on order, level and bins") {
  const SpaceSpec os = fixtures::unit_obs(2);
  const SpaceSpec as = fixtures::discrete_action(3);
  const auto q = QuantizationSchema::halving(os, as, 3);
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const Vec a = fixtures::random_point(os, rng), b = fixtures::random_point(os, rng);
    const auto ha = fixtures::random_history(as, rng.below(3), rng);
    const auto hb = fixtures::random_history(as, rng.below(3), rng);
    const int la = static_cast<int>(rng.below(4)), lb = static_cast<int>(rng.below(4));
    const bool same_state = ha.size() == hb.size() && la == lb &&
                            oracle::bins(a, os, la) == oracle::bins(b, os, lb) && [&] {
                              for (std::size_t t = 0; t < ha.size(); ++t) {
                                if (oracle::bins(ha[t], as, la) != oracle::bins(hb[t], as, lb)) return false;
                              }
                              return true;
                            }();
    CHECK((encode_key(a, ha, q, la) == encode_key(b, hb, q, lb)) == same_state);
  }
}

TEST_CASE("bins nest across levels and level 0 is a single bin") {
  const SpaceSpec os({ContinuousDim{-1.2, 0.6}, ContinuousDim{-0.07, 0.07}});
  const auto q = QuantizationSchema::halving(os, SpaceSpec({DiscreteDim{3}}), 6);
  Rng rng(9);
  for (int i = 0; i < 20000; ++i) {
    Vec o = fixtures::random_point(os, rng);
    if (i % 100 == 0) o = {0.6, 0.07};  // top edge
    if (i % 100 == 1) o = {-1.2, -0.07};
    CHECK(q.obs_bins(o, 0) == std::vector<std::int64_t>{0, 0});
    for (int j = 1; j <= 6; ++j) {
      const auto fine = q.obs_bins(o, j), coarse = q.obs_bins(o, j - 1);
      for (std::size_t d = 0; d < 2; ++d) CHECK(fine[d] / 2 == coarse[d]);
    }
    CHECK(q.obs_bins(o, 6) == oracle::bins(o, os, 6));
  }
}

TEST_CASE("out-of-range values clamp into the edge bins") {
  const SpaceSpec os = fixtures::unit_obs(1);
  const auto q = QuantizationSchema::halving(os, fixtures::discrete_action(2), 2);
  CHECK(q.obs_bins(Vec{-5.0}, 2) == std::vector<std::int64_t>{0});
  CHECK(q.obs_bins(Vec{5.0}, 2) == std::vector<std::int64_t>{3});
  CHECK(q.obs_bins(Vec{1.0}, 2) == std::vector<std::int64_t>{3});
}

TEST_CASE("space ingestion") {
  const SpaceSpec s({ContinuousDim{0.0, 1.0}, DiscreteDim{3}});
  CHECK(s.ingest(Vec{1.5, 2.0}) == Vec{1.0, 2.0});
  CHECK_THROWS_AS(s.ingest(Vec{0.5, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(s.ingest(Vec{std::nan(""), 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(s.ingest(Vec{0.5}), std::invalid_argument);
  CHECK_THROWS(SpaceSpec({ContinuousDim{1.0, 1.0}}));
  CHECK_THROWS(SpaceSpec({DiscreteDim{0}}));
}
