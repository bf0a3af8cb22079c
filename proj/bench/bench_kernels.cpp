// Serial reference vs OpenMP kernels: ensemble construction and batched
// decisions, plus single-decision latency.

#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "mre/core/batch.hpp"
#include "mre/core/model.hpp"
#include "mre/core/stack.hpp"
#include "mre/envs/environment.hpp"

using namespace mre;

namespace {

struct World {
  std::shared_ptr<const QuantizationSchema> schema;
  std::vector<Demonstration> demos;
  DemonstrationStack stack;
  std::vector<Query> queries;

  World()
      : schema(fixtures::schema(envs::make_env("lander")->spec().observation,
                                envs::make_env("lander")->spec().action, 4)),
        stack(schema, 3, FallbackPolicy::uniform_random(schema->action()), 1) {
    Rng rng(1);
    for (int d = 0; d < 50; ++d) {
      demos.push_back(fixtures::random_demo(schema->observation(), schema->action(), 2000, 3, rng, d));
      stack.add_demonstration(demos.back());
    }
    queries = random_queries(*schema, 3, 20000, 2);
  }
};

World& world() {
  static World w;
  return w;
}

void BM_BuildEnsembleSerial(benchmark::State& state) {
  auto& w = world();
  for (auto _ : state) benchmark::DoNotOptimize(build_ensemble_serial(w.demos[0], 3, w.schema));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.demos[0].transitions.size()));
}

void BM_BuildEnsembleParallel(benchmark::State& state) {
  auto& w = world();
  for (auto _ : state) benchmark::DoNotOptimize(build_ensemble(w.demos[0], 3, w.schema));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.demos[0].transitions.size()));
}

void BM_DecideBatchSerial(benchmark::State& state) {
  auto& w = world();
  for (auto _ : state) benchmark::DoNotOptimize(decide_batch_serial(w.stack, w.queries));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.queries.size()));
}

void BM_DecideBatchParallel(benchmark::State& state) {
  auto& w = world();
  for (auto _ : state) benchmark::DoNotOptimize(decide_batch(w.stack, w.queries));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.queries.size()));
}

void BM_SingleDecision(benchmark::State& state) {
  auto& w = world();
  Rng rng(3);
  std::size_t i = 0;
  for (auto _ : state) {
    const Query& q = w.queries[i++ % w.queries.size()];
    benchmark::DoNotOptimize(demo_stack_policy(w.stack, q.obs, q.history, rng));
  }
}

}  // namespace

BENCHMARK(BM_BuildEnsembleSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildEnsembleParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DecideBatchSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DecideBatchParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SingleDecision)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
