#pragma once

#include <memory>
#include <vector>

#include "mre/core/episode.hpp"
#include "mre/core/quantize.hpp"
#include "mre/core/rng.hpp"
#include "mre/core/space.hpp"

namespace fixtures {

using mre::Vec;

inline mre::SpaceSpec unit_obs(std::size_t dims) {
  return mre::SpaceSpec(std::vector<mre::DimSpec>(dims, mre::ContinuousDim{0.0, 1.0}));
}

inline mre::SpaceSpec discrete_action(std::int64_t n) {
  return mre::SpaceSpec({mre::DiscreteDim{n}});
}

inline std::shared_ptr<const mre::QuantizationSchema> schema(const mre::SpaceSpec& obs,
                                                             const mre::SpaceSpec& act, int k) {
  return std::make_shared<const mre::QuantizationSchema>(
      mre::QuantizationSchema::halving(obs, act, k));
}

inline Vec random_point(const mre::SpaceSpec& s, mre::Rng& rng) {
  Vec v;
  for (std::size_t d = 0; d < s.size(); ++d) {
    if (const auto* c = std::get_if<mre::ContinuousDim>(&s[d])) {
      v.push_back(rng.uniform(c->min, c->max));
    } else {
      v.push_back(static_cast<double>(rng.below(std::get<mre::DiscreteDim>(s[d]).cardinality)));
    }
  }
  return v;
}

/// Demonstration of `steps` human steps with random observations and actions.
inline mre::Demonstration random_demo(const mre::SpaceSpec& obs, const mre::SpaceSpec& act,
                                      std::size_t steps, int max_order, mre::Rng& rng,
                                      std::uint64_t id = 0) {
  mre::Episode ep;
  for (std::size_t t = 0; t < steps; ++t) {
    mre::StepRecord r;
    r.t = t + 1;
    r.obs = random_point(obs, rng);
    r.action = random_point(act, rng);
    r.source = mre::ControlSource::Human;
    ep.steps.push_back(std::move(r));
  }
  return mre::demonstration_from_episode(ep, max_order, id);
}

inline std::vector<Vec> random_history(const mre::SpaceSpec& act, std::size_t len, mre::Rng& rng) {
  std::vector<Vec> h;
  for (std::size_t i = 0; i < len; ++i) h.push_back(random_point(act, rng));
  return h;
}

}  // namespace fixtures
