#include "mre/core/batch.hpp"

namespace mre {

namespace {

PolicyDecision decide_one(const EnsembleList& list, const DemonstrationStack& stack,
                          const Query& q) {
  Rng rng(q.seed);
  return demo_stack_policy(list, stack.schema(), stack.max_order(), stack.min_match_level(),
                           stack.fallback(), q.obs, q.history, rng);
}

Vec random_point(const SpaceSpec& s, Rng& rng) {
  Vec v(s.size());
  for (std::size_t d = 0; d < s.size(); ++d) {
    if (const auto* c = std::get_if<ContinuousDim>(&s[d])) {
      v[d] = rng.uniform(c->min, c->max);
    } else {
      v[d] = static_cast<double>(
          rng.below(static_cast<std::uint64_t>(std::get<DiscreteDim>(s[d]).cardinality)));
    }
  }
  return v;
}

}  // namespace

std::vector<PolicyDecision> decide_batch_serial(const DemonstrationStack& stack,
                                                std::span<const Query> queries) {
  const auto snap = stack.snapshot();
  std::vector<PolicyDecision> out;
  out.reserve(queries.size());
  for (const Query& q : queries) out.push_back(decide_one(*snap, stack, q));
  return out;
}

std::vector<PolicyDecision> decide_batch(const DemonstrationStack& stack,
                                         std::span<const Query> queries) {
  const auto snap = stack.snapshot();
  std::vector<PolicyDecision> out(queries.size());
  const auto n = static_cast<std::int64_t>(queries.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = decide_one(*snap, stack, queries[static_cast<std::size_t>(i)]);
  }
  return out;
}

std::vector<Query> random_queries(const QuantizationSchema& schema, int max_order,
                                  std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Query> out(count);
  for (Query& q : out) {
    q.obs = random_point(schema.observation(), rng);
    const auto h = rng.below(static_cast<std::uint64_t>(max_order) + 1);
    for (std::uint64_t k = 0; k < h; ++k) q.history.push_back(random_point(schema.action(), rng));
    q.seed = rng();
  }
  return out;
}

}  // namespace mre
