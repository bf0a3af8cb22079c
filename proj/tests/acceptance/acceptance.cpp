// Acceptance checks: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "mre/core/batch.hpp"
#include "mre/core/key.hpp"
#include "mre/core/model.hpp"
#include "mre/core/policy.hpp"
#include "mre/core/serialize.hpp"
#include "mre/core/stack.hpp"
#include "mre/envs/environment.hpp"
#include "mre/session/session.hpp"
#include "oracle.hpp"

using namespace mre;

namespace {

// Pinned thresholds.
constexpr double kP5MedianMs = 1.0;
constexpr double kP5P99Ms = 5.0;
constexpr double kP6MinCompetence = 0.8;
constexpr double kP6MinSolveRate = 0.8;
constexpr double kP7MinMeanImprovement = 12.0;
constexpr int kCurveSeeds = 10;

int failures = 0;

void report(const char* id, bool pass, const std::string& detail) {
  std::printf("%s %s %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

/// Rollout of `steps` transitions in `env_id`, following the teacher with
/// probability 1 - eps and acting randomly otherwise. Episodes are chained
/// until enough steps are collected; each contributes its own histories.
Demonstration rollout_demo(std::string_view env_id, std::size_t steps, double eps, int max_order,
                           Rng& rng, std::uint64_t id = 0) {
  auto env = envs::make_env(env_id);
  const auto fb = FallbackPolicy::uniform_random(env->spec().action);
  Demonstration demo;
  demo.id = id;
  while (demo.transitions.size() < steps) {
    Episode ep;
    Vec obs = env->reset(rng());
    for (std::uint64_t t = 1; demo.transitions.size() + ep.steps.size() < steps; ++t) {
      const Vec a = rng.uniform() < eps ? fb(obs, rng) : env->teacher_action();
      const auto r = env->step(a);
      ep.steps.push_back({t, obs, a, r.reward, ControlSource::Human});
      obs = r.obs;
      if (r.done) break;
    }
    auto d = demonstration_from_episode(ep, max_order, id);
    for (auto& tr : d.transitions) demo.transitions.push_back(std::move(tr));
  }
  return demo;
}

std::shared_ptr<const QuantizationSchema> env_schema(std::string_view env_id, int k) {
  auto env = envs::make_env(env_id);
  return fixtures::schema(env->spec().observation, env->spec().action, k);
}

/// Query drawn either from a demonstrated state or uniformly at random,
/// occasionally outside the legal range.
struct Q {
  Vec obs;
  std::vector<Vec> history;
};

Q make_query(const std::vector<Demonstration>& demos, const SpaceSpec& os, const SpaceSpec& as,
             int max_order, Rng& rng) {
  Q q;
  const auto pick = rng.below(3);
  if (pick == 0 && !demos.empty()) {
    const auto& d = demos[rng.below(demos.size())];
    const auto& t = d.transitions[rng.below(d.transitions.size())];
    q.obs = t.obs;
    q.history = t.history;
  } else {
    q.obs = fixtures::random_point(os, rng);
    q.history = fixtures::random_history(as, rng.below(static_cast<std::uint64_t>(max_order) + 1), rng);
    if (pick == 2) {
      for (std::size_t d = 0; d < os.size(); ++d) {
        if (os.is_continuous(d)) q.obs[d] += rng.uniform(-2.0, 2.0);
      }
    }
  }
  return q;
}

void p1() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(101);
  std::size_t queries = 0, fallbacks = 0;
  const char* ids[] = {"mountain_car", "lander"};
  for (int i = 0; i < 1000; ++i) {
    const char* id = ids[i % 2];
    const auto schema = env_schema(id, 4);
    const auto demo = rollout_demo(id, 1 + rng.below(200), rng.uniform(), 3, rng, i);
    const MarkovEnsemble e = build_ensemble(demo, 3, schema);
    const auto fb = FallbackPolicy::uniform_random(schema->action());
    for (int k = 0; k < 20; ++k) {
      const Q q = make_query({demo}, schema->observation(), schema->action(), 3, rng);
      const auto d = ensemble_policy(e, q.obs, q.history, fb, rng, 0);
      ++queries;
      fallbacks += !d.matched();
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report("P1", fallbacks == 0 && secs < 60.0,
         fmt("level-0 totality: %zu fallbacks over %zu queries on 1000 demonstrations (%.1fs)",
             fallbacks, queries, secs));
}

void p2() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(202);
  std::size_t mismatches = 0, matched = 0;
  const char* ids[] = {"mountain_car", "lander"};
  for (int inst = 0; inst < 500; ++inst) {
    const char* id = ids[inst % 2];
    const int k = static_cast<int>(rng.below(5));
    const int n = static_cast<int>(rng.below(4));
    const auto schema = env_schema(id, k);
    const int min_level = static_cast<int>(rng.below(static_cast<std::uint64_t>(k) + 1));
    DemonstrationStack stack(schema, n, FallbackPolicy::uniform_random(schema->action()), min_level);
    std::vector<Demonstration> newest_first;
    const auto count = rng.below(4);
    for (std::uint64_t d = 0; d < count; ++d) {
      auto demo = rollout_demo(id, 1 + rng.below(200), rng.uniform(), n, rng, d);
      stack.add_demonstration(demo);
      newest_first.insert(newest_first.begin(), std::move(demo));
    }
    const Q q = make_query(newest_first, schema->observation(), schema->action(), n, rng);
    const auto dec = demo_stack_policy(stack, q.obs, q.history, rng);
    const auto ref = oracle::scan_stack(newest_first, q.obs, q.history, schema->observation(),
                                        schema->action(), n, k, min_level);
    bool ok = dec.matched() == ref.has_value();
    if (ok && ref) {
      const Matched& m = *dec.match();
      ok = m.demo_index == ref->demo_index && m.order == ref->match.order &&
           m.level == ref->match.level && oracle::contains(ref->match.actions, dec.action);
      ++matched;
    }
    mismatches += !ok;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report("P2", mismatches == 0 && secs < 120.0,
         fmt("brute-force equivalence: %zu mismatches over 500 instances (%zu matched, %.1fs)",
             mismatches, matched, secs));
}

void p3() {
  Rng rng(303);
  std::size_t newer = 0, total = 0;
  const char* ids[] = {"mountain_car", "lander"};
  for (int round = 0; round < 10; ++round) {
    const char* id = ids[round % 2];
    const auto schema = env_schema(id, 4);
    DemonstrationStack stack(schema, 3, FallbackPolicy::uniform_random(schema->action()), 1);
    Demonstration older = rollout_demo(id, 150, 0.3, 3, rng, 0);
    Demonstration newer_demo = older;
    const Vec a{0.0}, b{1.0};
    for (auto& t : older.transitions) {
      t.action = a;
      for (auto& h : t.history) h = a;
    }
    for (auto& t : newer_demo.transitions) {
      t.action = b;
      for (auto& h : t.history) h = b;
    }
    stack.add_demonstration(older);
    stack.add_demonstration(newer_demo);
    for (int i = 0; i < 1000; ++i) {
      const auto& src = rng.below(2) ? older : newer_demo;
      const auto& t = src.transitions[rng.below(src.transitions.size())];
      const auto d = demo_stack_policy(stack, t.obs, t.history, rng);
      ++total;
      newer += d.action == b && d.match() && d.match()->demo_index == 0;
    }
  }
  report("P3", newer == total && total == 10000,
         fmt("precedence: newer action in %zu/%zu decisions on conflicting states", newer, total));
}

void p4() {
  Rng rng(404);
  std::size_t pairs = 0, violations = 0, shared = 0;
  const char* ids[] = {"mountain_car", "lander"};
  for (int round = 0; round < 2; ++round) {
    const auto schema = env_schema(ids[round], 6);
    const auto& os = schema->observation();
    const auto& as = schema->action();
    const int n = 3, k = 6;
    for (int p = 0; p < 50000; ++p) {
      const Vec a = fixtures::random_point(os, rng);
      Vec b = a;
      const double scale = std::ldexp(1.0, -static_cast<int>(rng.below(8)));
      for (std::size_t d = 0; d < os.size(); ++d) {
        const auto& c = std::get<ContinuousDim>(os[d]);
        b[d] += rng.uniform(-1.0, 1.0) * scale * c.range();
      }
      auto ha = fixtures::random_history(as, n, rng);
      auto hb = ha;
      const auto diverge = rng.below(n + 1);  // hb differs from ha in its oldest `diverge` entries
      for (std::uint64_t i = 0; i < diverge; ++i) hb[i] = fixtures::random_point(as, rng);

      // equal[i][j]: keys of order i at level j agree
      bool equal[n + 1][k + 1];
      for (int i = 0; i <= n; ++i) {
        const std::span<const Vec> sa(ha.end() - i, ha.end()), sb(hb.end() - i, hb.end());
        for (int j = 0; j <= k; ++j) equal[i][j] = encode_key(a, sa, *schema, j) == encode_key(b, sb, *schema, j);
      }
      ++pairs;
      for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= k; ++j) {
          if (!equal[i][j]) continue;
          ++shared;
          for (int i2 = 0; i2 <= i; ++i2) {
            for (int j2 = 0; j2 <= j; ++j2) violations += !equal[i2][j2];
          }
        }
      }
    }
  }
  report("P4", violations == 0 && pairs == 100000,
         fmt("monotonicity: %zu violations over %zu key pairs (%zu shared cells)", violations,
             pairs, shared));
}

void p5() {
  Rng rng(505);
  const auto schema = env_schema("lander", 4);
  DemonstrationStack stack(schema, 3, FallbackPolicy::uniform_random(schema->action()), 1);
  std::vector<Demonstration> demos;
  std::size_t transitions = 0;
  for (int d = 0; d < 50; ++d) {
    demos.push_back(rollout_demo("lander", 2000, 0.2, 3, rng, d));
    transitions += demos.back().transitions.size();
    stack.add_demonstration(demos.back());
  }
  std::vector<Q> qs;
  for (int i = 0; i < 20000; ++i) qs.push_back(make_query(demos, schema->observation(), schema->action(), 3, rng));
  std::vector<double> ms;
  ms.reserve(qs.size());
  for (const Q& q : qs) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto d = demo_stack_policy(stack, q.obs, q.history, rng);
    const auto t1 = std::chrono::steady_clock::now();
    (void)d;
    ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  std::sort(ms.begin(), ms.end());
  const double p50 = ms[ms.size() / 2], p99 = ms[ms.size() * 99 / 100];

  // Worst case: nothing matches above the gate, so every ensemble is swept.
  stack.set_min_match_level(4);
  std::vector<double> sweep;
  std::uint32_t lookups = 0;
  for (int i = 0; i < 5000; ++i) {
    Q q;
    q.obs = fixtures::random_point(schema->observation(), rng);
    q.history = fixtures::random_history(schema->action(), 3, rng);
    const auto t0 = std::chrono::steady_clock::now();
    const auto d = demo_stack_policy(stack, q.obs, q.history, rng);
    const auto t1 = std::chrono::steady_clock::now();
    lookups = std::max(lookups, d.lookups);
    sweep.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  std::sort(sweep.begin(), sweep.end());
  const double s50 = sweep[sweep.size() / 2], s99 = sweep[sweep.size() * 99 / 100];

  report("P5", p50 < kP5MedianMs && p99 < kP5P99Ms && s50 < kP5MedianMs && s99 < kP5P99Ms &&
                   transitions == 100000,
         fmt("latency: p50 %.4f ms, p99 %.4f ms, max %.4f ms over %zu decisions; full sweep "
             "(%u lookups) p50 %.4f ms, p99 %.4f ms; 50 ensembles, %zu transitions",
             p50, p99, ms.back(), ms.size(), lookups, s50, s99, transitions));
}

session::SessionConfig curve_config(const char* env, std::uint64_t seed) {
  session::SessionConfig c;
  c.env_id = env;
  c.seed = seed;
  c.baseline_episodes = 10;
  c.teacher_episodes = 5;
  c.eval_episodes = 25;
  return c;
}

void p6() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  double worst_comp = 1.0, worst_solve = 1.0, worst_base = 0.0;
  for (int seed = 0; seed < kCurveSeeds; ++seed) {
    const auto cfg = curve_config("mountain_car", seed);
    session::Session s(cfg);
    for (std::uint64_t e = 0; e < cfg.total_episodes(); ++e) s.run_episode();
    const auto& tl = s.metrics_timeline();
    double base = 0, solve = 0, comp = 0;
    for (int e = 0; e < 10; ++e) base += tl[e].solved;
    for (std::size_t e = tl.size() - 10; e < tl.size(); ++e) {
      solve += tl[e].solved;
      comp += tl[e].competence.value_or(0.0);
    }
    base /= 10, solve /= 10, comp /= 10;
    ok &= comp >= kP6MinCompetence && solve >= kP6MinSolveRate && solve > base;
    worst_comp = std::min(worst_comp, comp);
    worst_solve = std::min(worst_solve, solve);
    worst_base = std::max(worst_base, base);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report("P6", ok && secs < 120.0,
         fmt("mountain car curve over %d seeds: worst final-10 competence %.3f, worst solve rate %.2f, "
             "best baseline solve rate %.2f (%.1fs)",
             kCurveSeeds, worst_comp, worst_solve, worst_base, secs));
}

void p7() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  double min_gain = 1e9, sum_gain = 0;
  for (int seed = 0; seed < kCurveSeeds; ++seed) {
    const auto cfg = curve_config("lander", seed);
    session::Session s(cfg);
    for (std::uint64_t e = 0; e < cfg.total_episodes(); ++e) s.run_episode();
    const auto& tl = s.metrics_timeline();
    double base = 0, fin = 0;
    for (int e = 0; e < 10; ++e) base += tl[e].reward;
    for (std::size_t e = tl.size() - 10; e < tl.size(); ++e) fin += tl[e].reward;
    const double gain = (fin - base) / 10.0;
    ok &= gain > 0.0;
    min_gain = std::min(min_gain, gain);
    sum_gain += gain;
  }
  const double mean_gain = sum_gain / kCurveSeeds;
  ok &= mean_gain >= kP7MinMeanImprovement;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report("P7", ok && secs < 180.0,
         fmt("lander improvement over %d seeds: final-10 minus baseline mean reward, min %+.2f, mean %+.2f (%.1fs)",
             kCurveSeeds, min_gain, mean_gain, secs));
}

void p8() {
  Rng rng(808);
  std::size_t decreases = 0, traces = 0;
  const char* ids[] = {"mountain_car", "lander"};
  for (int tr = 0; tr < 100; ++tr) {
    const char* id = ids[tr % 2];
    const auto schema = env_schema(id, 4);
    DemonstrationStack stack(schema, 3, FallbackPolicy::uniform_random(schema->action()),
                             1 + static_cast<int>(rng.below(4)));
    std::vector<Demonstration> demos;
    for (int d = 0; d < 8; ++d) demos.push_back(rollout_demo(id, 1 + rng.below(150), rng.uniform(), 3, rng, d));
    std::vector<Q> trace;
    for (int i = 0; i < 200; ++i) trace.push_back(make_query(demos, schema->observation(), schema->action(), 3, rng));
    std::size_t prev = 0;
    for (const auto& d : demos) {
      stack.add_demonstration(d);
      std::size_t matched = 0;
      Rng r(tr);
      for (const Q& q : trace) matched += demo_stack_policy(stack, q.obs, q.history, r).matched();
      decreases += matched < prev;
      prev = matched;
    }
    ++traces;
  }
  report("P8", decreases == 0 && traces == 100,
         fmt("competence monotonicity: %zu decreases over %zu traces of 200 queries, 8 demonstrations each",
             decreases, traces));
}

void p9() {
  Rng rng(909);
  std::size_t diffs = 0, stacks = 0, queries = 0;
  const char* ids[] = {"mountain_car", "lander"};
  for (int s = 0; s < 200; ++s) {
    const char* id = ids[s % 2];
    const int k = static_cast<int>(rng.below(6));
    const int n = static_cast<int>(rng.below(4));
    const auto schema = env_schema(id, k);
    const auto fb = rng.below(2) ? FallbackPolicy::uniform_random(schema->action())
                                 : FallbackPolicy::idle(schema->action(), {0.0});
    DemonstrationStack stack(schema, n, fb, static_cast<int>(rng.below(static_cast<std::uint64_t>(k) + 1)));
    std::vector<Demonstration> demos;
    const auto count = rng.below(5);
    for (std::uint64_t d = 0; d < count; ++d) {
      demos.push_back(rollout_demo(id, 1 + rng.below(300), rng.uniform(), n, rng, d));
      stack.add_demonstration(demos.back());
    }
    const auto bytes = serialize_stack(stack);
    const auto back = deserialize_stack(bytes);
    diffs += serialize_stack(back) != bytes;
    for (int i = 0; i < 1000; ++i) {
      const Q q = make_query(demos, schema->observation(), schema->action(), n, rng);
      Rng r1(i), r2(i);
      const auto a = demo_stack_policy(stack, q.obs, q.history, r1);
      const auto b = demo_stack_policy(back, q.obs, q.history, r2);
      diffs += a.action != b.action || a.provenance != b.provenance || a.lookups != b.lookups;
      ++queries;
    }
    ++stacks;
  }
  report("P9", diffs == 0 && stacks == 200,
         fmt("serialization: %zu differences over %zu stacks and %zu queries", diffs, stacks, queries));
}

void p10() {
  bool same = true;
  std::size_t bytes = 0;
  for (const char* env : {"mountain_car", "lander"}) {
    for (std::uint64_t seed : {0ULL, 17ULL, 123456789ULL}) {
      std::string csv[2];
      for (auto& out : csv) {
        const auto cfg = curve_config(env, seed);
        session::Session s(cfg);
        for (std::uint64_t e = 0; e < cfg.total_episodes(); ++e) s.run_episode();
        out = session::metrics_csv(s.metrics_timeline());
      }
      same &= csv[0] == csv[1];
      bytes += csv[0].size();
    }
  }
  report("P10", same, fmt("determinism: rerun metrics CSV byte-identical for 6 (env, seed) pairs, %zu bytes", bytes));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> checks{p1, p2, p3, p4, p5, p6, p7, p8, p9, p10};
  for (const auto& c : checks) c();
  std::printf("%d of %zu criteria failed\n", failures, checks.size());
  return failures;
}
