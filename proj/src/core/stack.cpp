#include "mre/core/stack.hpp"

#include <stdexcept>

namespace mre {

DemonstrationStack::DemonstrationStack(std::shared_ptr<const QuantizationSchema> schema,
                                       int max_order, FallbackPolicy fallback,
                                       int min_match_level)
    : schema_(std::move(schema)),
      max_order_(max_order),
      fallback_(std::move(fallback)),
      min_match_level_(0),
      ensembles_(std::make_shared<const EnsembleList>()),
      counters_(std::make_unique<AtomicCounters>()) {
  if (!schema_) throw std::invalid_argument("stack needs a schema");
  if (max_order_ < 0 || max_order_ > kMaxOrder) throw std::invalid_argument("max_order out of range");
  if (!(fallback_.action_space() == schema_->action())) {
    throw std::invalid_argument("fallback action space differs from the schema");
  }
  set_min_match_level(min_match_level);
}

DemonstrationStack::DemonstrationStack(const DemonstrationStack& other)
    : schema_(other.schema_),
      max_order_(other.max_order_),
      fallback_(other.fallback_),
      min_match_level_(other.min_match_level()),
      ensembles_(other.snapshot()),
      counters_(std::make_unique<AtomicCounters>()) {}

DemonstrationStack& DemonstrationStack::operator=(const DemonstrationStack& other) {
  if (this == &other) return *this;
  auto snap = other.snapshot();
  schema_ = other.schema_;
  max_order_ = other.max_order_;
  fallback_ = other.fallback_;
  min_match_level_.store(other.min_match_level(), std::memory_order_relaxed);
  {
    std::lock_guard lock(mutex_);
    ensembles_ = std::move(snap);
  }
  counters_ = std::make_unique<AtomicCounters>();
  return *this;
}

void DemonstrationStack::set_fallback(FallbackPolicy f) {
  if (!(f.action_space() == schema_->action())) {
    throw std::invalid_argument("fallback action space differs from the schema");
  }
  fallback_ = std::move(f);
}

void DemonstrationStack::set_min_match_level(int level) {
  if (level < 0 || level > schema_->max_level()) {
    throw std::invalid_argument("min_match_level out of range");
  }
  min_match_level_.store(level, std::memory_order_relaxed);
}

std::shared_ptr<const EnsembleList> DemonstrationStack::snapshot() const {
  std::lock_guard lock(mutex_);
  return ensembles_;
}

void DemonstrationStack::push(std::shared_ptr<const MarkovEnsemble> ensemble) {
  if (!ensemble) throw std::invalid_argument("null ensemble");
  if (ensemble->max_order() != max_order_ || !(ensemble->schema() == *schema_)) {
    throw std::invalid_argument("ensemble does not match the stack's schema/order");
  }
  std::lock_guard lock(mutex_);
  auto next = std::make_shared<EnsembleList>();
  next->reserve(ensembles_->size() + 1);
  next->push_back(std::move(ensemble));
  next->insert(next->end(), ensembles_->begin(), ensembles_->end());
  ensembles_ = std::move(next);
}

const MarkovEnsemble& DemonstrationStack::add_demonstration(const Demonstration& demo) {
  auto e = std::make_shared<const MarkovEnsemble>(build_ensemble(demo, max_order_, schema_));
  const MarkovEnsemble& ref = *e;
  push(std::move(e));
  return ref;
}

StackCounters DemonstrationStack::counters() const {
  const auto& c = *counters_;
  return {c.queries.load(), c.lookups.load(), c.matched.load(), c.fallbacks.load(),
          c.clamped.load()};
}

void DemonstrationStack::record(const PolicyDecision& d) const {
  auto& c = *counters_;
  c.queries.fetch_add(1, std::memory_order_relaxed);
  c.lookups.fetch_add(d.lookups, std::memory_order_relaxed);
  (d.matched() ? c.matched : c.fallbacks).fetch_add(1, std::memory_order_relaxed);
  if (d.clamped) c.clamped.fetch_add(1, std::memory_order_relaxed);
}

PolicyDecision demo_stack_policy(const EnsembleList& ensembles, const QuantizationSchema& schema,
                                 int max_order, int min_match_level,
                                 const FallbackPolicy& fallback, std::span<const double> obs,
                                 std::span<const Vec> history, Rng& rng) {
  auto& keys = detail::thread_query_keys();
  PolicyDecision d;
  d.clamped = keys.reset(schema, max_order, obs, history);
  if (d.clamped) detail::note_clamped();
  for (std::size_t e = 0; e < ensembles.size(); ++e) {
    const MarkovEnsemble& ens = *ensembles[e];
    const auto m = detail::sweep(ens, keys, min_match_level, d.lookups);
    if (m.bag) {
      d.action = ens.action(sample_ref(*m.bag, rng));
      d.provenance = Matched{e, m.order, m.level};
      return d;
    }
  }
  d.action = fallback(obs, rng);
  return d;
}

PolicyDecision demo_stack_policy(const DemonstrationStack& stack, std::span<const double> obs,
                                 std::span<const Vec> history, Rng& rng) {
  const auto snap = stack.snapshot();
  PolicyDecision d = demo_stack_policy(*snap, stack.schema(), stack.max_order(),
                                       stack.min_match_level(), stack.fallback(), obs, history,
                                       rng);
  stack.record(d);
  return d;
}

}  // namespace mre
