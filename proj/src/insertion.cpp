#include "tdinsert/insertion.hpp"

#include <cmath>
#include <stdexcept>
#include <string_view>

namespace tdinsert {

namespace {

using Clock = std::chrono::steady_clock;

bool on_time(double t, double limit) { return t <= limit + kTimeEps; }

// Minimum objective; near-equal objectives go to the lexicographically
// smallest (i, j) so every algorithm commits the same route.
struct BestCandidate {
  bool found = false;
  double objective = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  std::size_t j = 0;

  void offer(double obj, std::size_t ci, std::size_t cj) {
    bool take = !found || obj < objective - kTimeEps;
    if (!take && std::abs(obj - objective) <= kTimeEps) {
      take = ci < i || (ci == i && cj < j);
    }
    if (take) {
      found = true;
      objective = obj;
      i = ci;
      j = cj;
    }
  }
};

InsertionOutcome finish(const Worker& worker, const Request& request,
                        const BestCandidate& best, std::uint64_t queries_before,
                        const QueryCounter& counter, Clock::time_point start) {
  InsertionOutcome out;
  out.feasible = best.found;
  if (best.found) {
    out.i_star = best.i;
    out.j_star = best.j;
    out.objective = best.objective;
    out.new_route = splice(worker.route, request, best.i, best.j);
  }
  out.point_queries_used = counter.point_queries - queries_before;
  out.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(
      Clock::now() - start);
  return out;
}

void require_arrays(const Route& route, CompoundMode mode, const char* who) {
  if (!route.has_arrays() || !route.has_latest() || route.compound != mode) {
    throw std::logic_error(std::string(who) +
                           " requires initialized arrays and compound functions");
  }
}

// Sequential evaluation of a spliced route, one point query per leg.
std::optional<double> evaluate_from_scratch(const Route& candidate, int load,
                                            int capacity, const TdGraph& graph,
                                            QueryCounter& counter) {
  bool feasible = load <= capacity;
  double t = candidate.start_time;
  for (std::size_t k = 1; k < candidate.stops.size(); ++k) {
    const Stop& prev = candidate.stops[k - 1];
    const Stop& stop = candidate.stops[k];
    auto d = query(graph, prev.vertex, stop.vertex, t, counter);
    if (!d) return std::nullopt;
    t += *d;
    if (stop.kind == StopKind::kPickup) {
      load += stop.passengers;
    } else if (stop.kind == StopKind::kDropoff) {
      load -= stop.passengers;
      if (!on_time(t, stop.deadline)) feasible = false;
    }
    if (load > capacity) feasible = false;
  }
  if (!feasible) return std::nullopt;
  return t;
}

std::optional<double> timed_query(const TdGraph& graph, VertexId from,
                                  VertexId to, double depart,
                                  QueryCounter& counter) {
  auto d = query(graph, from, to, depart, counter);
  if (!d) return std::nullopt;
  return depart + *d;
}

void check_positions(const Route& route, std::size_t i, std::size_t j) {
  if (i < 1 || i > j || j > route.n() + 1) {
    throw std::out_of_range("insertion positions must satisfy 1 <= i <= j <= n+1");
  }
}

}  // namespace

Route splice(const Route& route, const Request& request, std::size_t i,
             std::size_t j) {
  check_positions(route, i, j);
  Route out;
  out.start_time = route.start_time;
  out.stops.reserve(route.stops.size() + 2);
  for (std::size_t k = 0; k <= route.n() + 1; ++k) {
    if (k == i) out.stops.push_back(Stop::pickup(request));
    if (k == j) out.stops.push_back(Stop::dropoff(request));
    if (k <= route.n()) out.stops.push_back(route.stops[k]);
  }
  return out;
}

std::optional<double> evaluate_candidate_cubic(const Worker& worker,
                                               const Request& request,
                                               std::size_t i, std::size_t j,
                                               const TdGraph& graph,
                                               QueryCounter& counter) {
  const Route candidate = splice(worker.route, request, i, j);
  return evaluate_from_scratch(candidate, worker.route.onboard_at_start(),
                               worker.capacity, graph, counter);
}

InsertionOutcome insert_cubic(const Worker& worker, const Request& request,
                              const TdGraph& graph, QueryCounter& counter) {
  const auto start = Clock::now();
  const auto before = counter.point_queries;
  const Route& route = worker.route;
  const int onboard = route.onboard_at_start();
  const std::size_t n = route.n();

  BestCandidate best;
  for (std::size_t i = 1; i <= n + 1; ++i) {
    for (std::size_t j = i; j <= n + 1; ++j) {
      const Route candidate = splice(route, request, i, j);
      auto obj = evaluate_from_scratch(candidate, onboard, worker.capacity,
                                       graph, counter);
      if (obj) best.offer(*obj, i, j);
    }
  }
  return finish(worker, request, best, before, counter, start);
}

std::optional<double> evaluate_candidate_quadratic(const Worker& worker,
                                                   const Request& request,
                                                   std::size_t i, std::size_t j,
                                                   const TdGraph& graph,
                                                   QueryCounter& counter) {
  const Route& route = worker.route;
  require_arrays(route, CompoundMode::kAllPairs, "evaluate_candidate_quadratic");
  check_positions(route, i, j);
  const std::size_t n = route.n();
  const int room = worker.capacity - request.passengers;
  const VertexId o = request.origin;
  const VertexId d = request.destination;

  if (route.num[i - 1] > room) return std::nullopt;
  auto pick = timed_query(graph, route.stops[i - 1].vertex, o, route.arr[i - 1], counter);
  if (!pick || !on_time(*pick, request.deadline)) return std::nullopt;

  double arr_i = 0.0;
  if (i <= n) {
    auto a = timed_query(graph, o, route.stops[i].vertex, *pick, counter);
    if (!a || !on_time(*a, route.latest[i])) return std::nullopt;
    arr_i = *a;
  }

  std::optional<double> deliver;
  if (j == i) {
    deliver = timed_query(graph, o, d, *pick, counter);
  } else {
    for (std::size_t k = i; k < j; ++k) {
      if (route.num[k] > room) return std::nullopt;
    }
    const double before_d =
        j - 1 == i ? arr_i : arr_i + route.pair(i, j - 1).eval(arr_i);
    deliver = timed_query(graph, route.stops[j - 1].vertex, d, before_d, counter);
  }
  if (!deliver || !on_time(*deliver, request.deadline)) return std::nullopt;
  if (j == n + 1) return *deliver;

  auto arr_j = timed_query(graph, d, route.stops[j].vertex, *deliver, counter);
  if (!arr_j || !on_time(*arr_j, route.latest[j])) return std::nullopt;
  return j == n ? *arr_j : *arr_j + route.pair(j, n).eval(*arr_j);
}

InsertionOutcome insert_quadratic(const Worker& worker, const Request& request,
                                  const TdGraph& graph, QueryCounter& counter) {
  const auto start = Clock::now();
  const auto before = counter.point_queries;
  const Route& route = worker.route;
  require_arrays(route, CompoundMode::kAllPairs, "insert_quadratic");
  const std::size_t n = route.n();
  const int room = worker.capacity - request.passengers;
  const VertexId o = request.origin;
  const VertexId d = request.destination;

  BestCandidate best;
  for (std::size_t i = 1; i <= n + 1; ++i) {
    if (route.num[i - 1] > room) continue;
    auto pick = timed_query(graph, route.stops[i - 1].vertex, o, route.arr[i - 1], counter);
    if (!pick || !on_time(*pick, request.deadline)) continue;
    double arr_i = 0.0;
    if (i <= n) {
      auto a = timed_query(graph, o, route.stops[i].vertex, *pick, counter);
      if (!a || !on_time(*a, route.latest[i])) continue;
      arr_i = *a;
    }

    for (std::size_t j = i; j <= n + 1; ++j) {
      std::optional<double> deliver;
      if (j == i) {
        deliver = timed_query(graph, o, d, *pick, counter);
      } else {
        // The request rides through v_{j-1}.
        if (route.num[j - 1] > room) break;
        const double before_d =
            j - 1 == i ? arr_i : arr_i + route.pair(i, j - 1).eval(arr_i);
        deliver = timed_query(graph, route.stops[j - 1].vertex, d, before_d, counter);
      }
      if (!deliver || !on_time(*deliver, request.deadline)) continue;

      if (j == n + 1) {
        best.offer(*deliver, i, j);
        continue;
      }
      auto arr_j = timed_query(graph, d, route.stops[j].vertex, *deliver, counter);
      if (!arr_j || !on_time(*arr_j, route.latest[j])) continue;
      const double obj = j == n ? *arr_j : *arr_j + route.pair(j, n).eval(*arr_j);
      best.offer(obj, i, j);
    }
  }
  return finish(worker, request, best, before, counter, start);
}

InsertionOutcome insert_linear(const Worker& worker, const Request& request,
                               const TdGraph& graph, QueryCounter& counter,
                               LinearTrace* trace) {
  const auto start = Clock::now();
  const auto before = counter.point_queries;
  const Route& route = worker.route;
  require_arrays(route, CompoundMode::kLegAndTail, "insert_linear");
  const std::size_t n = route.n();
  const int room = worker.capacity - request.passengers;
  const VertexId o = request.origin;
  const VertexId d = request.destination;

  auto objective_from = [&](std::size_t k, double arrival) {
    return k == n ? arrival : arrival + route.tail_fn[k].eval(arrival);
  };

  // Best origin position so far and the arrival at v_{k-1} it yields.
  std::optional<std::size_t> plc;
  double plc_arrival = 0.0;

  BestCandidate best;
  if (trace) trace->clear();
  for (std::size_t k = 1; k <= n + 1; ++k) {
    LinearStep step;
    step.k = k;
    const VertexId prev = route.stops[k - 1].vertex;
    const bool room_at_prev = route.num[k - 1] <= room;

    std::optional<double> fresh;   // origin right before v_k
    std::optional<double> pick;
    if (room_at_prev) {
      pick = timed_query(graph, prev, o, route.arr[k - 1], counter);
      if (pick && !on_time(*pick, request.deadline)) pick.reset();
      if (pick && k <= n) {
        fresh = timed_query(graph, o, route.stops[k].vertex, *pick, counter);
        if (fresh && !on_time(*fresh, route.latest[k])) fresh.reset();
      }
    }

    // Origin and destination both before v_k.
    if (pick && (k == n + 1 || fresh)) {
      auto deliver = timed_query(graph, o, d, *pick, counter);
      if (deliver && on_time(*deliver, request.deadline)) {
        if (k == n + 1) {
          best.offer(*deliver, k, k);
        } else {
          auto delta = timed_query(graph, d, route.stops[k].vertex, *deliver, counter);
          if (delta && on_time(*delta, route.latest[k])) {
            best.offer(objective_from(k, *delta), k, k);
          }
        }
      }
    }

    // Origin at the tracked position, destination before v_k.
    if (room_at_prev && plc) {
      auto deliver = timed_query(graph, prev, d, plc_arrival, counter);
      if (deliver && on_time(*deliver, request.deadline)) {
        if (k == n + 1) {
          best.offer(*deliver, *plc, k);
        } else {
          auto delta = timed_query(graph, d, route.stops[k].vertex, *deliver, counter);
          if (delta && on_time(*delta, route.latest[k])) {
            best.offer(objective_from(k, *delta), *plc, k);
          }
        }
      }
    }

    // Advance the tracker to v_k.
    std::optional<double> carried;
    if (k <= n && room_at_prev && plc) {
      const double a = plc_arrival + route.leg_fn[k - 1].eval(plc_arrival);
      if (on_time(a, route.latest[k])) carried = a;
    }
    step.fresh_arrival = fresh;
    step.carried_arrival = carried;
    if (fresh && (!carried || *fresh < *carried - kTimeEps)) {
      plc = k;
      plc_arrival = *fresh;
    } else if (carried) {
      plc_arrival = *carried;
    } else {
      plc.reset();
    }
    step.pickup_position = plc;
    if (trace) trace->push_back(step);
  }
  return finish(worker, request, best, before, counter, start);
}

const char* to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kCubic:
      return "cubic";
    case Algorithm::kQuadratic:
      return "quadratic";
    case Algorithm::kLinear:
      return "linear";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  if (name == "cubic") return Algorithm::kCubic;
  if (name == "quadratic") return Algorithm::kQuadratic;
  if (name == "linear") return Algorithm::kLinear;
  return std::nullopt;
}

CompoundMode compound_mode_for(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kCubic:
      return CompoundMode::kNone;
    case Algorithm::kQuadratic:
      return CompoundMode::kAllPairs;
    case Algorithm::kLinear:
      return CompoundMode::kLegAndTail;
  }
  return CompoundMode::kNone;
}

InsertionOutcome insert(Algorithm algorithm, const Worker& worker,
                        const Request& request, const TdGraph& graph,
                        QueryCounter& counter) {
  switch (algorithm) {
    case Algorithm::kCubic:
      return insert_cubic(worker, request, graph, counter);
    case Algorithm::kQuadratic:
      return insert_quadratic(worker, request, graph, counter);
    case Algorithm::kLinear:
      return insert_linear(worker, request, graph, counter);
  }
  throw std::invalid_argument("unknown algorithm");
}

}  // namespace tdinsert
