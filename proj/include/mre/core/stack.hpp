#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "mre/core/model.hpp"
#include "mre/core/policy.hpp"

namespace mre {

using EnsembleList = std::vector<std::shared_ptr<const MarkovEnsemble>>;

struct StackCounters {
  std::uint64_t queries = 0;
  std::uint64_t lookups = 0;
  std::uint64_t matched = 0;
  std::uint64_t fallbacks = 0;
  std::uint64_t clamped = 0;
};

/// Precedence-ordered sequence of ensembles; index 0 is the newest and is
/// consulted first. One writer (add) and any number of concurrent readers:
/// readers work on an immutable snapshot, writers publish a new list.
class DemonstrationStack {
 public:
  DemonstrationStack(std::shared_ptr<const QuantizationSchema> schema, int max_order,
                     FallbackPolicy fallback, int min_match_level = 0);
  DemonstrationStack(const DemonstrationStack& other);
  DemonstrationStack& operator=(const DemonstrationStack& other);

  const QuantizationSchema& schema() const { return *schema_; }
  const std::shared_ptr<const QuantizationSchema>& schema_ptr() const { return schema_; }
  int max_order() const { return max_order_; }
  const FallbackPolicy& fallback() const { return fallback_; }
  void set_fallback(FallbackPolicy f);

  /// Levels below this are never consulted; 0 keeps every ensemble total.
  int min_match_level() const { return min_match_level_.load(std::memory_order_relaxed); }
  void set_min_match_level(int level);

  std::shared_ptr<const EnsembleList> snapshot() const;
  std::size_t size() const { return snapshot()->size(); }
  bool empty() const { return size() == 0; }

  /// Pushes a prebuilt ensemble to the front. Its schema and order must
  /// match the stack's.
  void push(std::shared_ptr<const MarkovEnsemble> ensemble);

  /// Builds a new ensemble from `demo` and pushes it. Throws
  /// std::invalid_argument on an empty demonstration.
  const MarkovEnsemble& add_demonstration(const Demonstration& demo);

  StackCounters counters() const;
  void record(const PolicyDecision& d) const;

 private:
  std::shared_ptr<const QuantizationSchema> schema_;
  int max_order_;
  FallbackPolicy fallback_;
  std::atomic<int> min_match_level_;

  mutable std::mutex mutex_;
  std::shared_ptr<const EnsembleList> ensembles_;

  struct AtomicCounters {
    std::atomic<std::uint64_t> queries{0}, lookups{0}, matched{0}, fallbacks{0}, clamped{0};
  };
  std::unique_ptr<AtomicCounters> counters_;
};

/// Consults ensembles newest to oldest, each with the full level/order sweep
/// and no fallback; the first match wins. If none match, the stack's
/// fallback policy decides.
PolicyDecision demo_stack_policy(const DemonstrationStack& stack, std::span<const double> obs,
                                 std::span<const Vec> history, Rng& rng);

/// Same, against an explicit snapshot (no counter updates).
PolicyDecision demo_stack_policy(const EnsembleList& ensembles, const QuantizationSchema& schema,
                                 int max_order, int min_match_level,
                                 const FallbackPolicy& fallback, std::span<const double> obs,
                                 std::span<const Vec> history, Rng& rng);

}  // namespace mre
