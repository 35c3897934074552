#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "tdinsert/insertion.hpp"
#include "tdinsert/routestate.hpp"
#include "tdinsert/tdgraph.hpp"

namespace tdtest {

using namespace tdinsert;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Random FIFO function with k breakpoints on [lo, hi]. Slopes stay in
// [-0.95, kMaxRise].
inline constexpr double kMaxRise = 5.0;

inline PwlFunction random_fifo(std::mt19937_64& rng, std::size_t k, double lo,
                               double hi, double w_max = 600.0) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::set<double> times{lo};
  if (k > 1) times.insert(hi);
  while (times.size() < k) times.insert(lo + (hi - lo) * unit(rng));
  std::vector<Breakpoint> pts;
  for (double t : times) {
    double w = w_max * unit(rng);
    if (!pts.empty()) {
      const double floor = pts.back().w - 0.95 * (t - pts.back().t);
      w = std::min(w, pts.back().w + kMaxRise * (t - pts.back().t));
      w = std::max(w, std::max(0.0, floor));
    }
    pts.push_back({t, w});
  }
  return PwlFunction(std::move(pts));
}

// Ring plus `chords` random extra edges, each with a random day-long FIFO
// function. `ring` false leaves connectivity to chance.
inline TdGraph random_graph(std::mt19937_64& rng, std::size_t vertices,
                            std::size_t chords, std::size_t breakpoints,
                            double w_max = 600.0, bool ring = true) {
  TdGraph g(vertices);
  std::set<std::pair<VertexId, VertexId>> present;
  auto add = [&](VertexId u, VertexId v) {
    if (u == v || !present.emplace(u, v).second) return;
    g.add_edge(u, v, normalize_to_day(random_fifo(rng, breakpoints, kDayBegin, kDayEnd, w_max)));
  };
  if (ring) {
    for (VertexId u = 0; u < vertices; ++u) {
      add(u, static_cast<VertexId>((u + 1) % vertices));
    }
  }
  std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(vertices - 1));
  const std::size_t max_edges = vertices * (vertices - 1);
  std::size_t attempts = 0;
  while (present.size() < std::min(max_edges, present.size() + chords) && chords > 0 &&
         attempts < 100 * (chords + 1)) {
    ++attempts;
    const std::size_t before = present.size();
    add(pick(rng), pick(rng));
    if (present.size() > before) --chords;
  }
  return g;
}

// Earliest arrival over every simple path from u to v, evaluated edge by
// edge. Exponential; only for tiny graphs.
inline std::optional<double> enumerate_paths(const TdGraph& g, VertexId u,
                                             VertexId v, double t) {
  if (u == v) return 0.0;
  double best = kInf;
  std::vector<char> on_path(g.vertex_count(), 0);
  std::function<void(VertexId, double)> dfs = [&](VertexId x, double at) {
    if (x == v) {
      best = std::min(best, at);
      return;
    }
    on_path[x] = 1;
    for (const auto& e : g.out_edges(x)) {
      if (!on_path[e.head]) dfs(e.head, e.travel.arrival(at));
    }
    on_path[x] = 0;
  };
  dfs(u, t);
  if (best == kInf) return std::nullopt;
  return best - t;
}

struct BruteForce {
  bool feasible = false;
  double objective = kInf;
  std::size_t i = 0;
  std::size_t j = 0;
};

// Tries every (i, j) and keeps the ones verify_route accepts.
inline BruteForce brute_force_insert(const Worker& worker, const Request& request,
                                     const TdGraph& g,
                                     const std::vector<Request>& assigned) {
  std::vector<Request> all = assigned;
  all.push_back(request);
  BruteForce best;
  const std::size_t n = worker.route.n();
  for (std::size_t i = 1; i <= n + 1; ++i) {
    for (std::size_t j = i; j <= n + 1; ++j) {
      const Route candidate = splice(worker.route, request, i, j);
      const auto report = verify_route(candidate, g, all, worker);
      if (!report.feasible()) continue;
      const double obj = report.arrivals.back();
      if (!best.feasible || obj < best.objective - kTimeEps) {
        best = {true, obj, i, j};
      }
    }
  }
  return best;
}

struct Instance {
  TdGraph graph{1};
  Worker worker;
  std::vector<Request> assigned;
  Request request;
};

struct InstanceShape {
  std::size_t vertices = 20;
  std::size_t chords = 30;
  std::size_t breakpoints = 4;
  std::size_t stops = 6;  // even
  double w_max = 600.0;
};

// Random feasible route of `stops` stops plus a new request. Deadlines get
// random slack over the planned arrivals, so the new request is sometimes
// insertable and sometimes not.
inline Instance random_instance(std::mt19937_64& rng, const InstanceShape& shape) {
  Instance inst;
  inst.graph = random_graph(rng, shape.vertices, shape.chords, shape.breakpoints,
                            shape.w_max);
  const TdGraph& g = inst.graph;
  std::uniform_int_distribution<VertexId> vertex(
      0, static_cast<VertexId>(shape.vertices - 1));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto distinct = [&] {
    VertexId a = vertex(rng), b = vertex(rng);
    while (a == b) b = vertex(rng);
    return std::pair{a, b};
  };

  const double t0 = 20000.0 + 40000.0 * unit(rng);
  const std::size_t count = shape.stops / 2;
  for (std::size_t r = 0; r < count; ++r) {
    auto [o, d] = distinct();
    const int pax = 1 + static_cast<int>(rng() % 2);
    inst.assigned.push_back({static_cast<RequestId>(r), o, d, t0 - 1.0, kNoDeadline, pax});
  }
  // Random interleaving with each pickup before its dropoff.
  std::vector<std::size_t> tokens;
  for (std::size_t r = 0; r < count; ++r) {
    tokens.push_back(2 * r);
    tokens.push_back(2 * r + 1);
  }
  std::shuffle(tokens.begin(), tokens.end(), rng);
  std::vector<char> picked(count, 0);
  Route route = Route::empty(vertex(rng), t0);
  std::vector<std::size_t> order;
  std::vector<std::size_t> pending = tokens;
  while (!pending.empty()) {
    for (auto it = pending.begin(); it != pending.end(); ++it) {
      const std::size_t r = *it / 2;
      if (*it % 2 == 0 || picked[r]) {
        if (*it % 2 == 0) picked[r] = 1;
        order.push_back(*it);
        pending.erase(it);
        break;
      }
    }
  }
  for (std::size_t tok : order) {
    const Request& r = inst.assigned[tok / 2];
    route.stops.push_back(tok % 2 == 0 ? Stop::pickup(r) : Stop::dropoff(r));
  }

  // Planned arrivals, then deadlines with random slack.
  std::vector<double> arr(route.stops.size(), t0);
  int load = 0, peak = 0;
  for (std::size_t k = 1; k < route.stops.size(); ++k) {
    arr[k] = arr[k - 1] + *earliest_travel_time(g, route.stops[k - 1].vertex,
                                                route.stops[k].vertex, arr[k - 1]);
    const Stop& s = route.stops[k];
    load += s.kind == StopKind::kPickup ? s.passengers : -s.passengers;
    peak = std::max(peak, load);
  }
  const double slack_scale = 600.0 + 3000.0 * unit(rng);
  for (std::size_t k = 1; k < route.stops.size(); ++k) {
    if (route.stops[k].kind == StopKind::kDropoff) {
      auto& r = inst.assigned[route.stops[k].request];
      r.deadline = arr[k] + slack_scale * unit(rng);
    }
  }
  for (auto& s : route.stops) {
    if (s.kind != StopKind::kStart) s.deadline = inst.assigned[s.request].deadline;
  }

  auto [o, d] = distinct();
  const double horizon = arr.back() - t0;
  inst.request = {static_cast<RequestId>(count), o, d, t0 - 1.0,
                  t0 + (0.3 + 1.5 * unit(rng)) * std::max(horizon, 1200.0),
                  1 + static_cast<int>(rng() % 2)};
  inst.worker = Worker{0, route.stops.front().vertex,
                       std::max(1, peak + static_cast<int>(rng() % 3)), std::move(route)};
  return inst;
}

// Copy of the worker with the arrays and compound storage `algorithm` needs.
inline Worker prepared(const Worker& worker, const TdGraph& g, Algorithm algorithm) {
  Worker w = worker;
  QueryCounter counter;
  ArrayOptions opts;
  opts.with_latest = algorithm != Algorithm::kCubic;
  init_arrays(w.route, g, counter, opts);
  if (algorithm != Algorithm::kCubic) build_compound(w.route, compound_mode_for(algorithm));
  return w;
}

}  // namespace tdtest
