#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "tdinsert/routestate.hpp"

namespace tdinsert {

/// Result of inserting one request into one worker's route.
///
/// Positions follow the insertion convention: the origin goes before v_i and
/// the destination before v_j, 1 <= i <= j <= n + 1. The objective is the
/// arrival time at the last stop of the new route.
struct InsertionOutcome {
  bool feasible = false;
  std::size_t i_star = 0;
  std::size_t j_star = 0;
  double objective = std::numeric_limits<double>::infinity();
  Route new_route;  // stop sequence only; run init_arrays before reuse
  std::uint64_t point_queries_used = 0;
  std::chrono::nanoseconds elapsed{0};
};

/// Stop sequence with the request's origin before v_i and destination
/// before v_j.
Route splice(const Route& route, const Request& request, std::size_t i,
             std::size_t j);

/// Cubic baseline: every (i, j) re-evaluated from v_0 with point queries.
InsertionOutcome insert_cubic(const Worker& worker, const Request& request,
                              const TdGraph& graph, QueryCounter& counter);

/// Quadratic: every (i, j) evaluated in O(1) with the all-pairs compound
/// functions. Requires build_compound(kAllPairs).
InsertionOutcome insert_quadratic(const Worker& worker, const Request& request,
                                  const TdGraph& graph, QueryCounter& counter);

/// One step of the linear scan, recorded for inspection.
struct LinearStep {
  std::size_t k = 0;
  /// Arrival at v_k with the origin inserted right before v_k.
  std::optional<double> fresh_arrival;
  /// Arrival at v_k with the origin kept at the previous best position.
  std::optional<double> carried_arrival;
  /// Best origin position for a destination after v_k (nullopt = NIL).
  std::optional<std::size_t> pickup_position;
};

using LinearTrace = std::vector<LinearStep>;

/// Linear: enumerates the destination position and tracks the best origin
/// position. Requires build_compound(kLegAndTail).
InsertionOutcome insert_linear(const Worker& worker, const Request& request,
                               const TdGraph& graph, QueryCounter& counter,
                               LinearTrace* trace = nullptr);

/// Single-candidate evaluations used to account per-candidate query cost.
/// nullopt when (i, j) is infeasible.
std::optional<double> evaluate_candidate_cubic(const Worker& worker,
                                               const Request& request,
                                               std::size_t i, std::size_t j,
                                               const TdGraph& graph,
                                               QueryCounter& counter);
std::optional<double> evaluate_candidate_quadratic(const Worker& worker,
                                                   const Request& request,
                                                   std::size_t i, std::size_t j,
                                                   const TdGraph& graph,
                                                   QueryCounter& counter);

enum class Algorithm { kCubic, kQuadratic, kLinear };

const char* to_string(Algorithm algorithm);
std::optional<Algorithm> parse_algorithm(std::string_view name);

/// Compound storage each algorithm expects on committed routes.
CompoundMode compound_mode_for(Algorithm algorithm);

InsertionOutcome insert(Algorithm algorithm, const Worker& worker,
                        const Request& request, const TdGraph& graph,
                        QueryCounter& counter);

}  // namespace tdinsert
