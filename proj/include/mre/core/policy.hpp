#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mre/core/model.hpp"
#include "mre/core/rng.hpp"
#include "mre/core/space.hpp"

namespace mre {

struct Matched {
  std::size_t demo_index = 0;  // 0 = newest ensemble
  int order = 0;
  int level = 0;
  bool operator==(const Matched&) const = default;
};

struct Fallback {
  bool operator==(const Fallback&) const = default;
};

using Provenance = std::variant<Matched, Fallback>;

std::string to_string(const Provenance& p);

struct PolicyDecision {
  Vec action;
  Provenance provenance = Fallback{};
  std::uint32_t lookups = 0;  // hash-table probes spent on this decision
  bool clamped = false;       // query had out-of-range components

  bool matched() const { return std::holds_alternative<Matched>(provenance); }
  const Matched* match() const { return std::get_if<Matched>(&provenance); }
};

/// Total default policy used when no model matches.
class FallbackPolicy {
 public:
  enum class Kind : std::uint8_t { UniformRandom = 0, Idle = 1, Custom = 2 };
  using Fn = std::function<Vec(std::span<const double> obs, Rng& rng)>;

  /// Uniform over the action space, drawn from the caller's generator.
  static FallbackPolicy uniform_random(SpaceSpec action);
  /// Always returns `action`.
  static FallbackPolicy idle(SpaceSpec action, Vec action_value);
  static FallbackPolicy custom(SpaceSpec action, Fn fn);

  Kind kind() const { return kind_; }
  const SpaceSpec& action_space() const { return space_; }
  const Vec& idle_action() const { return idle_; }

  /// Always a valid action; custom outputs are clamped into the action space.
  Vec operator()(std::span<const double> obs, Rng& rng) const;

 private:
  FallbackPolicy() = default;
  Kind kind_ = Kind::UniformRandom;
  SpaceSpec space_;
  Vec idle_;
  Fn fn_;
};

/// Algorithm 1 on one column (fixed level) of an ensemble: orders N..0,
/// first defined model wins, otherwise the fallback. `history` is the full
/// executed action history, oldest first; orders longer than it are skipped.
PolicyDecision stack_policy(const MarkovEnsemble& ensemble, int level,
                            std::span<const double> obs, std::span<const Vec> history,
                            const FallbackPolicy& fallback, Rng& rng);

/// Algorithm 2: levels K..min_match_level (outer), orders N..0 (inner).
PolicyDecision ensemble_policy(const MarkovEnsemble& ensemble, std::span<const double> obs,
                               std::span<const Vec> history, const FallbackPolicy& fallback,
                               Rng& rng, int min_match_level = 0);

namespace detail {

/// Per-query key cache: finest bins are computed once and each (order, level)
/// key at most once, then reused across every ensemble sharing the schema.
/// Buffers keep their capacity between queries.
class QueryKeys {
 public:
  /// Returns true if the query needed clamping.
  bool reset(const QuantizationSchema& schema, int max_order, std::span<const double> obs,
             std::span<const Vec> history);
  int usable_order() const { return usable_order_; }
  const std::string& key(int order, int level);

 private:
  const QuantizationSchema* schema_ = nullptr;
  int max_order_ = 0;
  int usable_order_ = 0;
  std::vector<std::int64_t> obs_finest_;
  std::vector<std::int64_t> hist_finest_;
  std::vector<std::int64_t> obs_level_;
  std::vector<std::int64_t> hist_level_;
  std::vector<std::string> keys_;
  std::vector<std::uint8_t> built_;
};

QueryKeys& thread_query_keys();

struct MatchResult {
  const ActionBag* bag = nullptr;
  int order = 0;
  int level = 0;
};

/// Full (level, order) sweep of one ensemble using prepared keys.
MatchResult sweep(const MarkovEnsemble& ensemble, QueryKeys& keys, int min_match_level,
                  std::uint32_t& lookups);

void note_clamped();

}  // namespace detail

}  // namespace mre
