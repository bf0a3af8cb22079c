#include "mre/session/bootstrap.hpp"

#include <stdexcept>

#include "mre/io/json.hpp"
#include "mre/session/session.hpp"

namespace mre::session {

BootstrapSummary bootstrap_export(const DemonstrationStack& stack, std::string_view env_id,
                                  std::uint64_t episodes, std::uint64_t seed, std::ostream& sink) {
  if (stack.empty()) throw std::invalid_argument("bootstrap export needs a non-empty stack");
  SessionConfig cfg;
  cfg.env_id = std::string(env_id);
  cfg.seed = seed;
  cfg.baseline_episodes = 0;
  cfg.eval_episodes = episodes;
  Session session(cfg, stack);

  const int n = stack.max_order();
  io::json header = {{"format", "mre-bootstrap"},
                     {"version", 1},
                     {"env", cfg.env_id},
                     {"observation", io::to_json(stack.schema().observation())},
                     {"action", io::to_json(stack.schema().action())},
                     {"max_order", n},
                     {"episodes", episodes},
                     {"seed", seed}};
  sink << header.dump() << '\n';

  BootstrapSummary summary;
  std::vector<Vec> executed;
  for (std::uint64_t e = 0; e < episodes; ++e) {
    executed.clear();
    for (;;) {
      const TickReport r = session.tick();
      if (!r.action.empty()) {
        io::json history = io::json::array();
        for (int k = n; k >= 1; --k) {
          if (static_cast<std::size_t>(k) <= executed.size()) {
            history.push_back(executed[executed.size() - static_cast<std::size_t>(k)]);
          } else {
            history.push_back(nullptr);
          }
        }
        io::json rec = {{"obs", r.obs},
                        {"history", std::move(history)},
                        {"action", r.action},
                        {"provenance", r.provenance ? io::to_json(*r.provenance) : io::json(nullptr)}};
        sink << rec.dump() << '\n';
        ++summary.records;
        if (r.provenance && std::holds_alternative<Matched>(*r.provenance)) ++summary.matched;
        executed.push_back(r.action);
      }
      if (r.done) break;
    }
    ++summary.episodes;
  }
  return summary;
}

}  // namespace mre::session
