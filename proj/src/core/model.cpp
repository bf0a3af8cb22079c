#include "mre/core/model.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#ifdef MRE_HAVE_OPENMP
#include <omp.h>
#endif

namespace mre {

std::uint32_t sample_ref(const ActionBag& bag, Rng& rng) {
  if (bag.empty()) throw std::logic_error("sample from an empty ActionBag");
  return bag.refs()[rng.below(bag.size())];
}

const Vec& sample_action(const ActionBag& bag, std::span<const Vec> pool, Rng& rng) {
  return pool[sample_ref(bag, rng)];
}

void MarkovModel::insert(std::string_view key, std::uint32_t action_ref) {
  if (key.size() < 2 || static_cast<unsigned char>(key[0]) != order_ ||
      static_cast<unsigned char>(key[1]) != level_) {
    throw std::invalid_argument("key does not belong to this model");
  }
  auto it = table_.find(key);
  if (it == table_.end()) it = table_.emplace(StateKey(key), ActionBag{}).first;
  it->second.push(action_ref);
}

void MarkovModel::emplace(StateKey key, ActionBag bag) {
  if (bag.empty()) throw std::invalid_argument("empty ActionBag");
  if (key.size() < 2 || static_cast<unsigned char>(key[0]) != order_ ||
      static_cast<unsigned char>(key[1]) != level_) {
    throw std::invalid_argument("key does not belong to this model");
  }
  if (!table_.emplace(std::move(key), std::move(bag)).second) {
    throw std::invalid_argument("duplicate key");
  }
}

std::size_t MarkovModel::total_actions() const {
  std::size_t n = 0;
  for (const auto& [k, bag] : table_) n += bag.size();
  return n;
}

std::vector<std::pair<const StateKey*, const ActionBag*>> MarkovModel::sorted_entries() const {
  std::vector<std::pair<const StateKey*, const ActionBag*>> out;
  out.reserve(table_.size());
  for (const auto& [k, bag] : table_) out.emplace_back(&k, &bag);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return *a.first < *b.first; });
  return out;
}

MarkovEnsemble::MarkovEnsemble(std::shared_ptr<const QuantizationSchema> schema, int max_order,
                               std::uint64_t source_id)
    : schema_(std::move(schema)), max_order_(max_order), source_id_(source_id) {
  if (!schema_) throw std::invalid_argument("ensemble needs a schema");
  if (max_order_ < 0 || max_order_ > kMaxOrder) throw std::invalid_argument("max_order out of range");
  grid_.reserve(static_cast<std::size_t>((max_order_ + 1) * schema_->levels()));
  for (int j = 0; j < schema_->levels(); ++j) {
    for (int i = 0; i <= max_order_; ++i) grid_.emplace_back(i, j);
  }
}

std::size_t MarkovEnsemble::key_count() const {
  std::size_t n = 0;
  for (const auto& m : grid_) n += m.size();
  return n;
}

std::size_t MarkovEnsemble::stored_actions() const {
  std::size_t n = 0;
  for (const auto& m : grid_) n += m.total_actions();
  return n;
}

std::size_t MarkovEnsemble::memory_estimate() const {
  std::size_t bytes = sizeof(*this);
  for (const Vec& a : actions_) bytes += sizeof(Vec) + a.size() * sizeof(double);
  for (const auto& m : grid_) {
    bytes += m.table().bucket_count() * sizeof(void*);
    for (const auto& [k, bag] : m.table()) {
      // node: key string + bag vector + hash link
      bytes += sizeof(StateKey) + sizeof(ActionBag) + 2 * sizeof(void*);
      if (k.size() > 15) bytes += k.capacity() + 1;
      bytes += bag.size() * sizeof(std::uint32_t);
    }
  }
  return bytes;
}

namespace {

// Finest-level bins for one transition, computed once and shared by all
// grid cells.
struct PreparedStep {
  std::vector<std::int64_t> obs;      // finest obs bins
  std::vector<std::int64_t> history;  // finest bins of the last h actions, oldest first
  int history_len = 0;
};

struct Prepared {
  std::vector<PreparedStep> steps;
  std::vector<Vec> actions;
};

PreparedStep prepare_step(const Transition& tr, int max_order, const QuantizationSchema& q,
                          Vec& action_out) {
  const SpaceSpec& os = q.observation();
  const SpaceSpec& as = q.action();
  PreparedStep p;
  Vec obs = os.ingest(tr.obs);
  action_out = as.ingest(tr.action);
  p.obs.resize(os.size());
  q.obs_finest(obs, p.obs);
  const std::size_t h = std::min<std::size_t>(static_cast<std::size_t>(max_order), tr.history.size());
  p.history_len = static_cast<int>(h);
  p.history.resize(h * as.size());
  for (std::size_t k = 0; k < h; ++k) {
    const Vec a = as.ingest(tr.history[tr.history.size() - h + k]);
    q.action_finest(a, std::span<std::int64_t>(p.history).subspan(k * as.size(), as.size()));
  }
  return p;
}

void check_inputs(const Demonstration& demo, int max_order,
                  const std::shared_ptr<const QuantizationSchema>& schema) {
  if (demo.empty()) throw std::invalid_argument("build_ensemble: empty demonstration");
  if (!schema) throw std::invalid_argument("build_ensemble: missing schema");
  if (max_order < 0 || max_order > kMaxOrder) {
    throw std::invalid_argument("build_ensemble: max_order out of range");
  }
  if (demo.transitions.size() > 0xffffffffULL) {
    throw std::invalid_argument("build_ensemble: too many transitions");
  }
}

// Inserts every prepared step into one grid cell, in demonstration order.
void fill_cell(MarkovModel& model, const Prepared& prep, const QuantizationSchema& q,
               std::string& key, std::vector<std::int64_t>& obs_bins,
               std::vector<std::int64_t>& hist_bins) {
  const int order = model.order();
  const int level = model.level();
  const std::size_t ad = q.action().size();
  obs_bins.resize(q.observation().size());
  hist_bins.resize(static_cast<std::size_t>(order) * ad);
  for (std::size_t t = 0; t < prep.steps.size(); ++t) {
    const PreparedStep& p = prep.steps[t];
    if (p.history_len < order) continue;
    q.obs_coarsen(p.obs, level, obs_bins);
    const std::size_t skip = static_cast<std::size_t>(p.history_len - order) * ad;
    for (int k = 0; k < order; ++k) {
      const std::size_t off = static_cast<std::size_t>(k) * ad;
      q.action_coarsen(std::span<const std::int64_t>(p.history).subspan(skip + off, ad), level,
                       std::span<std::int64_t>(hist_bins).subspan(off, ad));
    }
    write_key(key, order, level, obs_bins, hist_bins);
    model.insert(key, static_cast<std::uint32_t>(t));
  }
}

}  // namespace

MarkovEnsemble build_ensemble_serial(const Demonstration& demo, int max_order,
                                     std::shared_ptr<const QuantizationSchema> schema) {
  check_inputs(demo, max_order, schema);
  const QuantizationSchema& q = *schema;
  Prepared prep;
  prep.steps.reserve(demo.transitions.size());
  prep.actions.resize(demo.transitions.size());
  for (std::size_t t = 0; t < demo.transitions.size(); ++t) {
    prep.steps.push_back(prepare_step(demo.transitions[t], max_order, q, prep.actions[t]));
  }
  MarkovEnsemble ens(schema, max_order, demo.id);
  std::string key;
  std::vector<std::int64_t> obs_bins, hist_bins;
  for (int j = 0; j <= q.max_level(); ++j) {
    for (int i = 0; i <= max_order; ++i) {
      fill_cell(ens.model(i, j), prep, q, key, obs_bins, hist_bins);
    }
  }
  ens.set_actions(std::move(prep.actions));
  return ens;
}

MarkovEnsemble build_ensemble(const Demonstration& demo, int max_order,
                              std::shared_ptr<const QuantizationSchema> schema) {
  check_inputs(demo, max_order, schema);
  const QuantizationSchema& q = *schema;
  const auto n = static_cast<std::int64_t>(demo.transitions.size());
  Prepared prep;
  prep.steps.resize(demo.transitions.size());
  prep.actions.resize(demo.transitions.size());

  // Validation errors inside the parallel region are captured and rethrown.
  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < n; ++t) {
    try {
      prep.steps[t] = prepare_step(demo.transitions[t], max_order, q, prep.actions[t]);
    } catch (...) {
#pragma omp critical(mre_build_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  MarkovEnsemble ens(schema, max_order, demo.id);
  const std::int64_t cells = static_cast<std::int64_t>(max_order + 1) * q.levels();
#pragma omp parallel
  {
    std::string key;
    std::vector<std::int64_t> obs_bins, hist_bins;
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t c = 0; c < cells; ++c) {
      const int j = static_cast<int>(c / (max_order + 1));
      const int i = static_cast<int>(c % (max_order + 1));
      fill_cell(ens.model(i, j), prep, q, key, obs_bins, hist_bins);
    }
  }
  ens.set_actions(std::move(prep.actions));
  return ens;
}

}  // namespace mre
