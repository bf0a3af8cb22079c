// mre: headless experiment runner and model tooling.
//
// Exit codes: 0 success, 1 other failure, 2 invalid config,
// 3 unreadable model, 4 empty stack, 105+ command-line usage errors.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mre/core/batch.hpp"
#include "mre/core/serialize.hpp"
#include "mre/core/stats.hpp"
#include "mre/session/bootstrap.hpp"
#include "mre/session/config.hpp"
#include "mre/session/session.hpp"

namespace fs = std::filesystem;
using namespace mre;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitModel = 3;
constexpr int kExitEmpty = 4;

std::optional<DemonstrationStack> read_model(const fs::path& path) {
  try {
    return load_stack(path);
  } catch (const FormatError& e) {
    std::cerr << "error: " << path.string() << ": " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return std::nullopt;
}

int cmd_run(const fs::path& config_path, const fs::path& out, std::optional<std::uint64_t> seed) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot read config " << config_path.string() << "\n";
    return kExitConfig;
  }
  std::stringstream text;
  text << in.rdbuf();
  session::SessionConfig cfg;
  try {
    cfg = session::parse_config(text.str());
    if (seed) cfg.seed = *seed;
    cfg.validate();
  } catch (const session::ConfigError& e) {
    std::cerr << "error: " << config_path.string() << ": " << e.what() << "\n";
    return kExitConfig;
  }

  fs::create_directories(out);
  session::Session s(cfg);
  for (std::uint64_t i = 0; i < cfg.total_episodes(); ++i) s.run_episode();

  std::ofstream csv(out / "metrics.csv", std::ios::binary);
  csv << session::metrics_csv(s.metrics_timeline());
  if (!csv) {
    std::cerr << "error: cannot write " << (out / "metrics.csv").string() << "\n";
    return kExitFailure;
  }
  if (cfg.save_model) save_stack(s.stack(), out / "model.mrme");

  std::size_t solved = 0;
  for (const auto& m : s.metrics_timeline()) solved += m.solved;
  std::cout << "episodes=" << s.metrics_timeline().size() << "\n"
            << "solved=" << solved << "\n"
            << "demonstrations=" << s.stack().size() << "\n";
  return 0;
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto idx = static_cast<std::size_t>(q * static_cast<double>(v.size() - 1) + 0.5);
  return v[std::min(idx, v.size() - 1)];
}

int cmd_bench(const fs::path& model, std::size_t count, std::uint64_t seed) {
  auto stack = read_model(model);
  if (!stack) return kExitModel;
  const auto queries = random_queries(stack->schema(), stack->max_order(), count, seed);

  std::vector<double> micros;
  micros.reserve(queries.size());
  std::uint64_t lookups = 0, max_lookups = 0, matched = 0;
  for (const Query& q : queries) {
    Rng rng(q.seed);
    const auto t0 = std::chrono::steady_clock::now();
    const PolicyDecision d = demo_stack_policy(*stack, q.obs, q.history, rng);
    const auto t1 = std::chrono::steady_clock::now();
    micros.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
    lookups += d.lookups;
    max_lookups = std::max<std::uint64_t>(max_lookups, d.lookups);
    matched += d.matched();
  }
  const std::uint64_t bound = static_cast<std::uint64_t>(stack->size()) *
                              static_cast<std::uint64_t>(stack->max_order() + 1) *
                              static_cast<std::uint64_t>(stack->schema().levels());
  std::cout << "queries=" << queries.size() << "\n"
            << "ensembles=" << stack->size() << "\n"
            << "p50_us=" << percentile(micros, 0.50) << "\n"
            << "p99_us=" << percentile(micros, 0.99) << "\n"
            << "max_us=" << (micros.empty() ? 0.0 : *std::max_element(micros.begin(), micros.end()))
            << "\n"
            << "mean_lookups="
            << (queries.empty() ? 0.0 : static_cast<double>(lookups) / static_cast<double>(queries.size()))
            << "\n"
            << "max_lookups=" << max_lookups << "\n"
            << "lookup_bound=" << bound << "\n"
            << "matched=" << matched << "\n"
            << "fallback=" << queries.size() - matched << "\n";
  return 0;
}

int cmd_export(const fs::path& model, const std::string& env, std::uint64_t episodes,
               const fs::path& out, std::uint64_t seed) {
  auto stack = read_model(model);
  if (!stack) return kExitModel;
  if (stack->empty()) {
    std::cerr << "error: model has no demonstrations\n";
    return kExitEmpty;
  }
  std::ofstream sink(out, std::ios::binary);
  if (!sink) {
    std::cerr << "error: cannot write " << out.string() << "\n";
    return kExitFailure;
  }
  try {
    const auto summary = session::bootstrap_export(*stack, env, episodes, seed, sink);
    std::cout << "episodes=" << summary.episodes << "\n"
              << "records=" << summary.records << "\n"
              << "matched=" << summary.matched << "\n";
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return 0;
}

int cmd_stats(const fs::path& model) {
  auto stack = read_model(model);
  if (!stack) return kExitModel;
  std::cout << to_key_value(stack_stats(*stack));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive imitation learning with multi-resolution Markov ensembles"};
  app.require_subcommand(0, 1);
  bool print_config = false;
  app.add_flag("--print-config", print_config, "Print the default config and exit");

  fs::path run_config, run_out;
  std::optional<std::uint64_t> run_seed;
  auto* run = app.add_subcommand("run", "Run a scripted experiment");
  run->add_option("--config", run_config, "Config file")->required();
  run->add_option("--out", run_out, "Output directory")->required();
  run->add_option("--seed", run_seed, "Override the config seed");

  fs::path bench_model;
  std::size_t bench_queries = 10000;
  std::uint64_t bench_seed = 0;
  auto* bench = app.add_subcommand("bench", "Measure per-decision latency");
  bench->add_option("--model", bench_model, "Model file")->required();
  bench->add_option("--queries", bench_queries, "Number of random queries");
  bench->add_option("--seed", bench_seed, "Query seed");

  fs::path ex_model, ex_out;
  std::string ex_env;
  std::uint64_t ex_episodes = 10, ex_seed = 0;
  auto* ex = app.add_subcommand("export-bootstrap", "Roll out a model into a dataset");
  ex->add_option("--model", ex_model, "Model file")->required();
  ex->add_option("--env", ex_env, "Environment id")->required();
  ex->add_option("--episodes", ex_episodes, "Episodes to roll out");
  ex->add_option("--out", ex_out, "Output file")->required();
  ex->add_option("--seed", ex_seed, "Rollout seed");

  fs::path stats_model;
  auto* stats = app.add_subcommand("stats", "Print model statistics");
  stats->add_option("--model", stats_model, "Model file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (print_config) {
      std::cout << session::format_config(session::SessionConfig{});
      return 0;
    }
    if (*run) return cmd_run(run_config, run_out, run_seed);
    if (*bench) return cmd_bench(bench_model, bench_queries, bench_seed);
    if (*ex) return cmd_export(ex_model, ex_env, ex_episodes, ex_out, ex_seed);
    if (*stats) return cmd_stats(stats_model);
    std::cout << app.help();
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
