#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tdinsert/pwl.hpp"
#include "tdinsert/tdgraph.hpp"
#include "tdinsert/tdsp.hpp"

namespace tdinsert {

using RequestId = std::uint32_t;
using WorkerId = std::uint32_t;

/// Stand-in for an unbounded latest arrival time.
inline constexpr double kNoDeadline = 1e18;

struct Request {
  RequestId id = 0;
  VertexId origin = 0;
  VertexId destination = 0;
  double release_time = 0.0;
  double deadline = 0.0;
  int passengers = 1;
};

/// Throws std::invalid_argument when the request breaks its invariants.
void validate_request(const Request& request);

enum class StopKind { kStart, kPickup, kDropoff };

struct Stop {
  VertexId vertex = 0;
  StopKind kind = StopKind::kStart;
  RequestId request = 0;
  int passengers = 0;
  double deadline = kNoDeadline;

  static Stop start(VertexId v) { return {v, StopKind::kStart, 0, 0, kNoDeadline}; }
  static Stop pickup(const Request& r) {
    return {r.origin, StopKind::kPickup, r.id, r.passengers, r.deadline};
  }
  static Stop dropoff(const Request& r) {
    return {r.destination, StopKind::kDropoff, r.id, r.passengers, r.deadline};
  }
};

enum class CompoundMode { kNone, kLegAndTail, kAllPairs };

/// A worker's planned stop sequence v_0..v_n together with the auxiliary
/// arrays used by the insertion operators.
///
/// arr[k] is the arrival time at v_k, latest[k] the latest arrival at v_k
/// that keeps every downstream deadline, num[k] the passengers on board
/// after serving v_k. leg_fn[k] is the travel-time function v_k -> v_{k+1}
/// restricted to the departures that can still be feasible.
struct Route {
  std::vector<Stop> stops;
  double start_time = 0.0;

  std::vector<double> arr;
  std::vector<double> latest;
  std::vector<int> num;

  std::vector<PwlFunction> leg_fn;
  std::vector<PwlFunction> tail_fn;                 // kLegAndTail
  std::vector<std::vector<PwlFunction>> pair_fn;    // kAllPairs, pair_fn[x][y - x - 1]
  CompoundMode compound = CompoundMode::kNone;

  static Route empty(VertexId start, double start_time);

  std::size_t n() const { return stops.size() - 1; }
  bool has_arrays() const { return arr.size() == stops.size(); }
  bool has_latest() const { return latest.size() == stops.size(); }
  double makespan() const { return arr.back(); }

  /// Passengers on board when leaving v_0: dropoffs without a pickup.
  int onboard_at_start() const;

  /// travel(v_x, v_y, t) from the stored compound functions.
  const PwlFunction& pair(std::size_t x, std::size_t y) const {
    return pair_fn[x][y - x - 1];
  }

  /// Breakpoints held in compound storage; the memory proxy.
  std::size_t compound_breakpoints() const;
  std::size_t compound_function_count() const;
};

struct Worker {
  WorkerId id = 0;
  VertexId start_vertex = 0;
  int capacity = 1;
  Route route;

  static Worker idle(WorkerId id, VertexId start, int capacity,
                     double start_time) {
    return {id, start, capacity, Route::empty(start, start_time)};
  }
};

struct ArrayOptions {
  /// Build leg profiles and latest[]; the cubic baseline does not need them.
  bool with_latest = true;
  ProfileOptions profile;
  /// Extra seconds kept beyond latest[k] in each leg's domain.
  double window_pad = 1.0;
};

struct InitReport {
  bool feasible = true;
  std::optional<std::size_t> violation;  // first stop with arr > latest
};

/// Fills arr (forward recursion with point queries), num, and, when
/// requested, leg profiles plus latest (backward inversion of each leg).
InitReport init_arrays(Route& route, const TdGraph& graph,
                       QueryCounter& counter, const ArrayOptions& options = {});

/// Builds tail functions (kLegAndTail) or the all-pairs table (kAllPairs)
/// from the leg functions. Requires init_arrays with latest.
void build_compound(Route& route, CompoundMode mode);

enum class ViolationKind { kCompletion, kOrder, kDeadline, kCapacity, kUnreachable };

struct Violation {
  ViolationKind kind;
  std::size_t stop;
  std::string detail;
};

struct FeasibilityReport {
  std::vector<Violation> violations;
  std::vector<double> arrivals;

  bool feasible() const { return violations.empty(); }
};

/// Recomputes the route from scratch with uncounted point queries and
/// checks completion, order, deadline and capacity. `requests` are all
/// requests the route must serve; `worker` supplies the capacity.
FeasibilityReport verify_route(const Route& route, const TdGraph& graph,
                               std::span<const Request> requests,
                               const Worker& worker);

std::string to_string(ViolationKind kind);

}  // namespace tdinsert
