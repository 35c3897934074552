#pragma once

#include <cstdint>
#include <optional>

#include "tdinsert/pwl.hpp"
#include "tdinsert/tdgraph.hpp"

namespace tdinsert {

/// Invocation counts for the shortest-travel-time oracle. Single owner;
/// give each thread its own.
struct QueryCounter {
  std::uint64_t point_queries = 0;
  std::uint64_t profile_queries = 0;

  void reset() { *this = {}; }
};

/// Shortest travel time from u to v departing at t (time-dependent
/// Dijkstra). nullopt when v is unreachable from u.
std::optional<double> query(const TdGraph& graph, VertexId u, VertexId v,
                            double t, QueryCounter& counter);

/// Same as query() without touching any counter. Used by test oracles and
/// the sampled profile builder.
std::optional<double> earliest_travel_time(const TdGraph& graph, VertexId u,
                                           VertexId v, double t);

enum class ProfileMode {
  kExact,    // label-correcting search over link/merge
  kSampled,  // uniform grid of point evaluations, FIFO repaired
};

struct ProfileOptions {
  ProfileMode mode = ProfileMode::kExact;
  double sample_step = 60.0;
  std::size_t max_points = kDefaultMaxPoints;
};

/// Travel-time profile h with h(t) = query(u, v, t) for t in [t_lo, t_hi].
std::optional<PwlFunction> profile(const TdGraph& graph, VertexId u,
                                   VertexId v, double t_lo, double t_hi,
                                   QueryCounter& counter,
                                   const ProfileOptions& options = {});

}  // namespace tdinsert
