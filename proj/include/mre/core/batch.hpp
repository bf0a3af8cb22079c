#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mre/core/stack.hpp"

namespace mre {

/// A self-contained policy query; the seed fixes the sampling stream.
struct Query {
  Vec obs;
  std::vector<Vec> history;  // executed actions, oldest first
  std::uint64_t seed = 0;
};

/// Evaluates every query against one snapshot of the stack. Queries are
/// independent, so results do not depend on the thread count. Parallel over
/// queries with OpenMP.
std::vector<PolicyDecision> decide_batch(const DemonstrationStack& stack,
                                         std::span<const Query> queries);

/// Single-threaded reference for decide_batch.
std::vector<PolicyDecision> decide_batch_serial(const DemonstrationStack& stack,
                                                std::span<const Query> queries);

/// Random queries that are valid for the stack's spaces; history lengths
/// range over 0..max_order.
std::vector<Query> random_queries(const QuantizationSchema& schema, int max_order,
                                  std::size_t count, std::uint64_t seed);

}  // namespace mre
