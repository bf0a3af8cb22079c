#include "mre/core/stats.hpp"

#include <sstream>

namespace mre {

StackStats stack_stats(const DemonstrationStack& stack) {
  StackStats s;
  const auto snap = stack.snapshot();
  s.ensembles = snap->size();
  s.counters = stack.counters();
  for (const auto& e : *snap) {
    EnsembleStats es;
    es.source_id = e->source_id();
    es.transitions = e->transitions();
    for (const auto& m : e->models()) {
      es.keys_per_model.push_back(m.size());
      es.keys += m.size();
      es.stored_actions += m.total_actions();
    }
    es.memory_bytes = e->memory_estimate();
    s.transitions += es.transitions;
    s.keys += es.keys;
    s.stored_actions += es.stored_actions;
    s.memory_bytes += es.memory_bytes;
    s.per_ensemble.push_back(std::move(es));
  }
  return s;
}

std::string to_key_value(const StackStats& s) {
  std::ostringstream out;
  out << "ensembles=" << s.ensembles << '\n'
      << "transitions=" << s.transitions << '\n'
      << "keys=" << s.keys << '\n'
      << "stored_actions=" << s.stored_actions << '\n'
      << "memory_bytes=" << s.memory_bytes << '\n'
      << "queries=" << s.counters.queries << '\n'
      << "lookups=" << s.counters.lookups << '\n'
      << "matched=" << s.counters.matched << '\n'
      << "fallbacks=" << s.counters.fallbacks << '\n'
      << "clamped=" << s.counters.clamped << '\n';
  for (std::size_t i = 0; i < s.per_ensemble.size(); ++i) {
    const auto& e = s.per_ensemble[i];
    const std::string p = "ensemble." + std::to_string(i) + ".";
    out << p << "source_id=" << e.source_id << '\n'
        << p << "transitions=" << e.transitions << '\n'
        << p << "keys=" << e.keys << '\n'
        << p << "stored_actions=" << e.stored_actions << '\n'
        << p << "memory_bytes=" << e.memory_bytes << '\n';
  }
  return out.str();
}

}  // namespace mre
