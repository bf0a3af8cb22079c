#include "mre/core/policy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace mre {

std::string to_string(const Provenance& p) {
  if (const auto* m = std::get_if<Matched>(&p)) {
    return "matched(demo=" + std::to_string(m->demo_index) + ",order=" +
           std::to_string(m->order) + ",level=" + std::to_string(m->level) + ")";
  }
  return "fallback";
}

FallbackPolicy FallbackPolicy::uniform_random(SpaceSpec action) {
  FallbackPolicy f;
  f.kind_ = Kind::UniformRandom;
  f.space_ = std::move(action);
  return f;
}

FallbackPolicy FallbackPolicy::idle(SpaceSpec action, Vec action_value) {
  FallbackPolicy f;
  f.kind_ = Kind::Idle;
  f.idle_ = action.ingest(action_value);
  f.space_ = std::move(action);
  return f;
}

FallbackPolicy FallbackPolicy::custom(SpaceSpec action, Fn fn) {
  if (!fn) throw std::invalid_argument("custom fallback needs a function");
  FallbackPolicy f;
  f.kind_ = Kind::Custom;
  f.space_ = std::move(action);
  f.fn_ = std::move(fn);
  return f;
}

Vec FallbackPolicy::operator()(std::span<const double> obs, Rng& rng) const {
  switch (kind_) {
    case Kind::Idle:
      return idle_;
    case Kind::Custom: {
      Vec a = fn_(obs, rng);
      space_.clamp_in_place(a);
      return a;
    }
    case Kind::UniformRandom:
      break;
  }
  Vec a(space_.size());
  for (std::size_t d = 0; d < space_.size(); ++d) {
    if (const auto* c = std::get_if<ContinuousDim>(&space_[d])) {
      a[d] = rng.uniform(c->min, c->max);
    } else {
      a[d] = static_cast<double>(
          rng.below(static_cast<std::uint64_t>(std::get<DiscreteDim>(space_[d]).cardinality)));
    }
  }
  return a;
}

namespace detail {

bool QueryKeys::reset(const QuantizationSchema& schema, int max_order,
                      std::span<const double> obs, std::span<const Vec> history) {
  schema_ = &schema;
  max_order_ = max_order;
  const std::size_t od = schema.observation().size();
  const std::size_t ad = schema.action().size();
  usable_order_ = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(max_order),
                                                         history.size()));
  obs_finest_.resize(od);
  obs_level_.resize(od);
  bool clamped = schema.obs_finest(obs, obs_finest_);
  const std::size_t h = static_cast<std::size_t>(usable_order_);
  hist_finest_.resize(h * ad);
  hist_level_.resize(h * ad);
  for (std::size_t k = 0; k < h; ++k) {
    const Vec& a = history[history.size() - h + k];
    if (a.size() != ad) throw std::invalid_argument("history action dimension mismatch");
    clamped |= schema.action_finest(a, std::span<std::int64_t>(hist_finest_).subspan(k * ad, ad));
  }
  const std::size_t cells =
      static_cast<std::size_t>(max_order + 1) * static_cast<std::size_t>(schema.levels());
  if (keys_.size() < cells) keys_.resize(cells);
  built_.assign(cells, 0);
  return clamped;
}

const std::string& QueryKeys::key(int order, int level) {
  const std::size_t idx = static_cast<std::size_t>(level) * static_cast<std::size_t>(max_order_ + 1) +
                          static_cast<std::size_t>(order);
  std::string& k = keys_[idx];
  if (built_[idx]) return k;
  const QuantizationSchema& q = *schema_;
  const std::size_t ad = q.action().size();
  q.obs_coarsen(obs_finest_, level, obs_level_);
  const std::size_t skip = static_cast<std::size_t>(usable_order_ - order) * ad;
  for (int i = 0; i < order; ++i) {
    const std::size_t off = static_cast<std::size_t>(i) * ad;
    q.action_coarsen(std::span<const std::int64_t>(hist_finest_).subspan(skip + off, ad), level,
                     std::span<std::int64_t>(hist_level_).subspan(off, ad));
  }
  write_key(k, order, level, obs_level_,
            std::span<const std::int64_t>(hist_level_).first(static_cast<std::size_t>(order) * ad));
  built_[idx] = 1;
  return k;
}

QueryKeys& thread_query_keys() {
  thread_local QueryKeys keys;
  return keys;
}

MatchResult sweep(const MarkovEnsemble& ensemble, QueryKeys& keys, int min_match_level,
                  std::uint32_t& lookups) {
  const int top_order = std::min(ensemble.max_order(), keys.usable_order());
  for (int j = ensemble.max_level(); j >= std::max(0, min_match_level); --j) {
    for (int i = top_order; i >= 0; --i) {
      ++lookups;
      if (const ActionBag* bag = ensemble.model(i, j).find(keys.key(i, j))) {
        return {bag, i, j};
      }
    }
  }
  return {};
}

void note_clamped() {
  static std::atomic<bool> warned{false};
  if (!warned.exchange(true, std::memory_order_relaxed)) {
    std::clog << "warning: out-of-range query components clamped into the space bounds\n";
  }
}

}  // namespace detail

namespace {

void check_level(const MarkovEnsemble& e, int level) {
  if (level < 0 || level > e.max_level()) throw std::invalid_argument("level out of range");
}

}  // namespace

PolicyDecision stack_policy(const MarkovEnsemble& ensemble, int level,
                            std::span<const double> obs, std::span<const Vec> history,
                            const FallbackPolicy& fallback, Rng& rng) {
  check_level(ensemble, level);
  auto& keys = detail::thread_query_keys();
  PolicyDecision d;
  d.clamped = keys.reset(ensemble.schema(), ensemble.max_order(), obs, history);
  if (d.clamped) detail::note_clamped();
  for (int i = keys.usable_order(); i >= 0; --i) {
    ++d.lookups;
    if (const ActionBag* bag = ensemble.model(i, level).find(keys.key(i, level))) {
      d.action = ensemble.action(sample_ref(*bag, rng));
      d.provenance = Matched{0, i, level};
      return d;
    }
  }
  d.action = fallback(obs, rng);
  return d;
}

PolicyDecision ensemble_policy(const MarkovEnsemble& ensemble, std::span<const double> obs,
                               std::span<const Vec> history, const FallbackPolicy& fallback,
                               Rng& rng, int min_match_level) {
  auto& keys = detail::thread_query_keys();
  PolicyDecision d;
  d.clamped = keys.reset(ensemble.schema(), ensemble.max_order(), obs, history);
  if (d.clamped) detail::note_clamped();
  const auto m = detail::sweep(ensemble, keys, min_match_level, d.lookups);
  if (m.bag) {
    d.action = ensemble.action(sample_ref(*m.bag, rng));
    d.provenance = Matched{0, m.order, m.level};
  } else {
    d.action = fallback(obs, rng);
  }
  return d;
}

}  // namespace mre
