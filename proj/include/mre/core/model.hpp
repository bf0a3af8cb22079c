#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mre/core/episode.hpp"
#include "mre/core/key.hpp"
#include "mre/core/quantize.hpp"
#include "mre/core/rng.hpp"

namespace mre {

/// Multiset of demonstrated (original, unquantized) actions observed after one
/// quantized extended state. Entries reference the owning ensemble's action
/// pool; insertion order is preserved.
class ActionBag {
 public:
  ActionBag() = default;
  explicit ActionBag(std::vector<std::uint32_t> refs) : refs_(std::move(refs)) {}

  void push(std::uint32_t ref) { refs_.push_back(ref); }
  std::size_t size() const { return refs_.size(); }
  bool empty() const { return refs_.empty(); }
  std::span<const std::uint32_t> refs() const { return refs_; }

  bool operator==(const ActionBag&) const = default;

 private:
  std::vector<std::uint32_t> refs_;
};

/// Uniform draw over the multiset; returns the pool reference.
std::uint32_t sample_ref(const ActionBag& bag, Rng& rng);

/// Uniform draw over the multiset, resolved against `pool`.
const Vec& sample_action(const ActionBag& bag, std::span<const Vec> pool, Rng& rng);

struct KeyHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

/// One Markov model M_{i,j}: quantized extended state -> ActionBag.
class MarkovModel {
 public:
  using Table = std::unordered_map<StateKey, ActionBag, KeyHash, std::equal_to<>>;

  MarkovModel(int order, int level) : order_(order), level_(level) {}

  int order() const { return order_; }
  int level() const { return level_; }

  /// Adds one occurrence. The key's order/level prefix must match the model.
  void insert(std::string_view key, std::uint32_t action_ref);
  /// Bulk-restores a bag (deserialization).
  void emplace(StateKey key, ActionBag bag);

  const ActionBag* find(std::string_view key) const {
    auto it = table_.find(key);
    return it == table_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return table_.size(); }
  std::size_t total_actions() const;
  const Table& table() const { return table_; }

  /// Entries sorted by key bytes, for canonical output.
  std::vector<std::pair<const StateKey*, const ActionBag*>> sorted_entries() const;

  bool operator==(const MarkovModel& o) const {
    return order_ == o.order_ && level_ == o.level_ && table_ == o.table_;
  }

 private:
  int order_;
  int level_;
  Table table_;
};

/// The (N+1) x (K+1) grid of Markov models built from one demonstration.
/// Immutable after construction.
class MarkovEnsemble {
 public:
  MarkovEnsemble(std::shared_ptr<const QuantizationSchema> schema, int max_order,
                 std::uint64_t source_id);

  int max_order() const { return max_order_; }
  int max_level() const { return schema_->max_level(); }
  std::uint64_t source_id() const { return source_id_; }
  const QuantizationSchema& schema() const { return *schema_; }
  const std::shared_ptr<const QuantizationSchema>& schema_ptr() const { return schema_; }

  const MarkovModel& model(int order, int level) const { return grid_[index(order, level)]; }
  MarkovModel& model(int order, int level) { return grid_[index(order, level)]; }
  std::span<const MarkovModel> models() const { return grid_; }

  /// Original demonstrated actions, one per transition, in demonstration order.
  std::span<const Vec> actions() const { return actions_; }
  const Vec& action(std::uint32_t ref) const { return actions_[ref]; }
  std::size_t transitions() const { return actions_.size(); }

  std::size_t key_count() const;
  std::size_t stored_actions() const;
  /// Rough heap footprint in bytes.
  std::size_t memory_estimate() const;

  /// Used by builders and deserialization only.
  void set_actions(std::vector<Vec> actions) { actions_ = std::move(actions); }

  bool operator==(const MarkovEnsemble& o) const {
    return max_order_ == o.max_order_ && source_id_ == o.source_id_ &&
           *schema_ == *o.schema_ && grid_ == o.grid_ && actions_ == o.actions_;
  }

 private:
  std::size_t index(int order, int level) const {
    return static_cast<std::size_t>(level) * static_cast<std::size_t>(max_order_ + 1) +
           static_cast<std::size_t>(order);
  }

  std::shared_ptr<const QuantizationSchema> schema_;
  int max_order_;
  std::uint64_t source_id_;
  std::vector<MarkovModel> grid_;
  std::vector<Vec> actions_;
};

/// Builds the ensemble for one demonstration. Every demonstrated step t is
/// inserted into M_{i,j} for each order i <= min(N, history length) and every
/// level j. Observations and actions are validated and clamped against the
/// schema's spaces. Grid cells are filled in parallel (OpenMP).
/// Throws std::invalid_argument on an empty demonstration.
MarkovEnsemble build_ensemble(const Demonstration& demo, int max_order,
                              std::shared_ptr<const QuantizationSchema> schema);

/// Single-threaded reference builder; produces an identical ensemble.
MarkovEnsemble build_ensemble_serial(const Demonstration& demo, int max_order,
                                     std::shared_ptr<const QuantizationSchema> schema);

}  // namespace mre
