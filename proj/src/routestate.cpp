#include "tdinsert/routestate.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace tdinsert {

namespace {

constexpr double kUnreachableTime = std::numeric_limits<double>::infinity();
constexpr double kNeverFeasible = std::numeric_limits<double>::lowest();

double clamp_to_day(double t) { return std::clamp(t, kDayBegin, kDayEnd); }

}  // namespace

void validate_request(const Request& r) {
  if (!(r.release_time < r.deadline)) {
    throw std::invalid_argument("request " + std::to_string(r.id) +
                                ": release time must precede deadline");
  }
  if (r.passengers < 1) {
    throw std::invalid_argument("request " + std::to_string(r.id) +
                                ": passenger count must be >= 1");
  }
  if (r.origin == r.destination) {
    throw std::invalid_argument("request " + std::to_string(r.id) +
                                ": origin equals destination");
  }
}

Route Route::empty(VertexId start, double start_time) {
  Route route;
  route.stops.push_back(Stop::start(start));
  route.start_time = start_time;
  route.arr = {start_time};
  route.latest = {kNoDeadline};
  route.num = {0};
  return route;
}

int Route::onboard_at_start() const {
  std::map<RequestId, int> open;
  int onboard = 0;
  for (const auto& s : stops) {
    if (s.kind == StopKind::kPickup) {
      open[s.request] = s.passengers;
    } else if (s.kind == StopKind::kDropoff && !open.contains(s.request)) {
      onboard += s.passengers;
    }
  }
  return onboard;
}

std::size_t Route::compound_breakpoints() const {
  std::size_t total = 0;
  switch (compound) {
    case CompoundMode::kNone:
      break;
    case CompoundMode::kLegAndTail:
      for (const auto& f : leg_fn) total += f.size();
      // tail[n-1] is the last leg and tail[n] the zero function.
      for (std::size_t k = 0; k + 2 < tail_fn.size(); ++k) {
        total += tail_fn[k].size();
      }
      break;
    case CompoundMode::kAllPairs:
      for (const auto& row : pair_fn) {
        for (const auto& f : row) total += f.size();
      }
      break;
  }
  return total;
}

std::size_t Route::compound_function_count() const {
  switch (compound) {
    case CompoundMode::kNone:
      return 0;
    case CompoundMode::kLegAndTail:
      return leg_fn.size() + (tail_fn.size() >= 2 ? tail_fn.size() - 2 : 0);
    case CompoundMode::kAllPairs: {
      std::size_t count = 0;
      for (const auto& row : pair_fn) count += row.size();
      return count;
    }
  }
  return 0;
}

InitReport init_arrays(Route& route, const TdGraph& graph,
                       QueryCounter& counter, const ArrayOptions& options) {
  if (route.stops.empty() || route.stops.front().kind != StopKind::kStart) {
    throw std::invalid_argument("route must begin with a start stop");
  }
  const std::size_t n = route.n();
  route.leg_fn.clear();
  route.tail_fn.clear();
  route.pair_fn.clear();
  route.compound = CompoundMode::kNone;

  route.arr.assign(n + 1, route.start_time);
  for (std::size_t k = 0; k < n; ++k) {
    if (route.arr[k] == kUnreachableTime) {
      route.arr[k + 1] = kUnreachableTime;
      continue;
    }
    auto d = query(graph, route.stops[k].vertex, route.stops[k + 1].vertex,
                   route.arr[k], counter);
    route.arr[k + 1] = d ? route.arr[k] + *d : kUnreachableTime;
  }

  route.num.assign(n + 1, route.onboard_at_start());
  for (std::size_t k = 1; k <= n; ++k) {
    const auto& s = route.stops[k];
    const int delta = s.kind == StopKind::kPickup    ? s.passengers
                      : s.kind == StopKind::kDropoff ? -s.passengers
                                                     : 0;
    route.num[k] = route.num[k - 1] + delta;
  }

  InitReport report;
  if (!options.with_latest) {
    route.latest.clear();
    for (std::size_t k = 0; k <= n; ++k) {
      if (route.arr[k] > route.stops[k].deadline + kTimeEps) {
        report.feasible = false;
        report.violation = k;
        break;
      }
    }
    return report;
  }

  if (std::find(route.arr.begin(), route.arr.end(), kUnreachableTime) !=
      route.arr.end()) {
    throw std::runtime_error("route contains an unreachable leg");
  }

  // Profiles over every departure from arr[k] to the end of the day; the
  // upper end is cut back once latest[] is known.
  std::vector<double> window_lo(n + 1);
  for (std::size_t k = 0; k <= n; ++k) window_lo[k] = clamp_to_day(route.arr[k]);
  route.leg_fn.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    auto leg = profile(graph, route.stops[k].vertex, route.stops[k + 1].vertex,
                       window_lo[k], kDayEnd, counter, options.profile);
    if (!leg) throw std::runtime_error("route contains an unreachable leg");
    route.leg_fn.push_back(std::move(*leg));
  }

  route.latest.assign(n + 1, kNoDeadline);
  route.latest[n] = route.stops[n].deadline;
  for (std::size_t k = n; k-- > 0;) {
    double propagated = kNoDeadline;
    if (route.latest[k + 1] < kNoDeadline) {
      auto t = latest_departure(route.leg_fn[k], route.latest[k + 1]);
      propagated = t ? *t : kNeverFeasible;
    }
    route.latest[k] = std::min(propagated, route.stops[k].deadline);
  }

  for (std::size_t k = 0; k < n; ++k) {
    const double hi =
        std::min(kDayEnd, std::max(window_lo[k], route.latest[k] + options.window_pad));
    route.leg_fn[k] = restrict_domain(route.leg_fn[k], window_lo[k], hi);
  }

  for (std::size_t k = 0; k <= n; ++k) {
    if (route.arr[k] > route.latest[k] + kTimeEps) {
      report.feasible = false;
      report.violation = k;
      break;
    }
  }
  return report;
}

void build_compound(Route& route, CompoundMode mode) {
  if (!route.has_latest() || route.leg_fn.size() != route.n()) {
    throw std::logic_error("build_compound requires init_arrays with latest");
  }
  const std::size_t n = route.n();
  route.tail_fn.clear();
  route.pair_fn.clear();
  route.compound = mode;

  if (mode == CompoundMode::kLegAndTail) {
    const double end_lo = clamp_to_day(route.arr[n]);
    std::vector<PwlFunction> tails(n + 1, PwlFunction::zero(end_lo, end_lo));
    for (std::size_t k = n; k-- > 0;) {
      tails[k] = k + 1 == n ? route.leg_fn[k] : link(route.leg_fn[k], tails[k + 1]);
    }
    route.tail_fn = std::move(tails);
  } else if (mode == CompoundMode::kAllPairs) {
    route.pair_fn.resize(n);
    for (std::size_t x = 0; x < n; ++x) {
      auto& row = route.pair_fn[x];
      row.reserve(n - x);
      row.push_back(route.leg_fn[x]);
      for (std::size_t y = x + 2; y <= n; ++y) {
        row.push_back(link(row.back(), route.leg_fn[y - 1]));
      }
    }
  }
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kCompletion:
      return "completion";
    case ViolationKind::kOrder:
      return "order";
    case ViolationKind::kDeadline:
      return "deadline";
    case ViolationKind::kCapacity:
      return "capacity";
    case ViolationKind::kUnreachable:
      return "unreachable";
  }
  return "unknown";
}

FeasibilityReport verify_route(const Route& route, const TdGraph& graph,
                               std::span<const Request> requests,
                               const Worker& worker) {
  FeasibilityReport report;
  auto violate = [&](ViolationKind kind, std::size_t stop, std::string detail) {
    report.violations.push_back({kind, stop, std::move(detail)});
  };
  if (route.stops.empty()) {
    violate(ViolationKind::kCompletion, 0, "route has no start stop");
    return report;
  }

  std::map<RequestId, const Request*> by_id;
  for (const auto& r : requests) by_id[r.id] = &r;

  struct Seen {
    std::optional<std::size_t> pickup;
    std::optional<std::size_t> dropoff;
  };
  std::map<RequestId, Seen> seen;
  for (std::size_t k = 0; k < route.stops.size(); ++k) {
    const auto& s = route.stops[k];
    if (s.kind == StopKind::kStart) {
      if (k != 0) violate(ViolationKind::kOrder, k, "start stop after v_0");
      continue;
    }
    if (k == 0) violate(ViolationKind::kOrder, 0, "v_0 is not a start stop");
    auto it = by_id.find(s.request);
    if (it == by_id.end()) {
      violate(ViolationKind::kCompletion, k,
              "stop for unknown request " + std::to_string(s.request));
      continue;
    }
    const Request& r = *it->second;
    auto& entry = seen[s.request];
    auto& slot = s.kind == StopKind::kPickup ? entry.pickup : entry.dropoff;
    const VertexId expected =
        s.kind == StopKind::kPickup ? r.origin : r.destination;
    if (slot) {
      violate(ViolationKind::kCompletion, k,
              "duplicate stop for request " + std::to_string(r.id));
    }
    if (s.vertex != expected) {
      violate(ViolationKind::kCompletion, k,
              "stop vertex does not match request " + std::to_string(r.id));
    }
    slot = k;
    if (s.kind == StopKind::kDropoff && entry.pickup && *entry.pickup > k) {
      violate(ViolationKind::kOrder, k, "dropoff before pickup");
    }
    if (s.kind == StopKind::kPickup && entry.dropoff) {
      violate(ViolationKind::kOrder, *entry.dropoff,
              "dropoff before pickup of request " + std::to_string(r.id));
    }
  }
  for (const auto& r : requests) {
    auto it = seen.find(r.id);
    if (it == seen.end() || !it->second.dropoff) {
      violate(ViolationKind::kCompletion, route.stops.size() - 1,
              "request " + std::to_string(r.id) + " is never delivered");
    }
  }

  // Load leaving v_0: requests delivered on this route but picked up before.
  int load = 0;
  for (const auto& [id, entry] : seen) {
    if (entry.dropoff && !entry.pickup) load += by_id.at(id)->passengers;
  }
  if (load > worker.capacity) {
    violate(ViolationKind::kCapacity, 0, "over capacity at start");
  }

  report.arrivals.assign(route.stops.size(), route.start_time);
  for (std::size_t k = 1; k < route.stops.size(); ++k) {
    auto d = earliest_travel_time(graph, route.stops[k - 1].vertex,
                                  route.stops[k].vertex,
                                  report.arrivals[k - 1]);
    if (!d) {
      violate(ViolationKind::kUnreachable, k, "no path to stop");
      report.arrivals.resize(k);
      return report;
    }
    report.arrivals[k] = report.arrivals[k - 1] + *d;

    const auto& s = route.stops[k];
    auto it = by_id.find(s.request);
    if (it == by_id.end()) continue;
    const Request& r = *it->second;
    if (s.kind == StopKind::kPickup) {
      load += r.passengers;
    } else if (s.kind == StopKind::kDropoff) {
      load -= r.passengers;
      if (report.arrivals[k] > r.deadline + kTimeEps) {
        violate(ViolationKind::kDeadline, k,
                "request " + std::to_string(r.id) + " delivered late");
      }
    }
    if (load > worker.capacity) {
      violate(ViolationKind::kCapacity, k, "over capacity");
    }
  }
  return report;
}

}  // namespace tdinsert
