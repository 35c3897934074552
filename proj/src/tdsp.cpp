#include "tdinsert/tdsp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

namespace tdinsert {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();
// Labels that improve by less than this are treated as unchanged.
constexpr double kProfileImprovement = 1e-10;

// Per-thread scratch so repeated point queries avoid O(V) allocation.
struct DijkstraWorkspace {
  std::vector<double> arrival;
  std::vector<std::uint32_t> stamp;
  std::uint32_t generation = 0;

  void prepare(std::size_t n) {
    if (arrival.size() != n) {
      arrival.assign(n, kInfinity);
      stamp.assign(n, 0);
      generation = 0;
    }
    if (++generation == 0) {
      std::fill(stamp.begin(), stamp.end(), 0);
      generation = 1;
    }
  }
  double get(VertexId v) const {
    return stamp[v] == generation ? arrival[v] : kInfinity;
  }
  void set(VertexId v, double value) {
    stamp[v] = generation;
    arrival[v] = value;
  }
};

using QueueEntry = std::pair<double, VertexId>;
using MinQueue =
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>>;

bool improves(const PwlFunction& candidate, const PwlFunction& label) {
  for (const auto& p : candidate.points()) {
    if (p.w < label.eval(p.t) - kProfileImprovement) return true;
  }
  for (const auto& p : label.points()) {
    if (candidate.eval(p.t) < p.w - kProfileImprovement) return true;
  }
  return false;
}

std::optional<PwlFunction> exact_profile(const TdGraph& graph, VertexId u,
                                         VertexId v, double t_lo, double t_hi,
                                         std::size_t max_points) {
  std::vector<std::optional<PwlFunction>> label(graph.vertex_count());
  std::vector<double> key(graph.vertex_count(), kInfinity);
  MinQueue queue;

  label[u] = PwlFunction::zero(t_lo, t_hi);
  key[u] = 0.0;
  queue.emplace(0.0, u);
  while (!queue.empty()) {
    const auto [k, x] = queue.top();
    queue.pop();
    if (k != key[x]) continue;
    key[x] = kInfinity;  // settled until improved again
    if (label[v] && k >= label[v]->max_weight()) break;

    for (const auto& e : graph.out_edges(x)) {
      PwlFunction candidate = link(*label[x], e.travel, max_points);
      auto& target = label[e.head];
      if (target) {
        if (!improves(candidate, *target)) continue;
        target = merge(*target, candidate, max_points);
      } else {
        target = std::move(candidate);
      }
      key[e.head] = target->min_weight();
      queue.emplace(key[e.head], e.head);
    }
  }
  return std::move(label[v]);
}

std::optional<PwlFunction> sampled_profile(const TdGraph& graph, VertexId u,
                                           VertexId v, double t_lo,
                                           double t_hi, double step) {
  std::vector<Breakpoint> pts;
  const auto samples =
      static_cast<std::size_t>(std::ceil((t_hi - t_lo) / step));
  for (std::size_t i = 0; i <= samples; ++i) {
    const double t = std::min(t_hi, t_lo + step * static_cast<double>(i));
    if (!pts.empty() && t <= pts.back().t) continue;
    auto travel = earliest_travel_time(graph, u, v, t);
    if (!travel) return std::nullopt;
    pts.push_back({t, *travel});
  }
  return compact(fifo_repair(PwlFunction(std::move(pts))));
}

}  // namespace

std::optional<double> earliest_travel_time(const TdGraph& graph, VertexId u,
                                           VertexId v, double t) {
  if (u == v) return 0.0;
  thread_local DijkstraWorkspace ws;
  ws.prepare(graph.vertex_count());
  MinQueue queue;
  ws.set(u, t);
  queue.emplace(t, u);
  while (!queue.empty()) {
    const auto [at, x] = queue.top();
    queue.pop();
    if (at > ws.get(x)) continue;
    if (x == v) return at - t;
    for (const auto& e : graph.out_edges(x)) {
      const double next = e.travel.arrival(at);
      if (next < ws.get(e.head)) {
        ws.set(e.head, next);
        queue.emplace(next, e.head);
      }
    }
  }
  return std::nullopt;
}

std::optional<double> query(const TdGraph& graph, VertexId u, VertexId v,
                            double t, QueryCounter& counter) {
  ++counter.point_queries;
  return earliest_travel_time(graph, u, v, t);
}

std::optional<PwlFunction> profile(const TdGraph& graph, VertexId u,
                                   VertexId v, double t_lo, double t_hi,
                                   QueryCounter& counter,
                                   const ProfileOptions& options) {
  ++counter.profile_queries;
  if (t_lo > t_hi) throw PwlError("profile window is empty");
  if (u == v) return PwlFunction::zero(t_lo, t_hi);
  if (options.mode == ProfileMode::kSampled) {
    return sampled_profile(graph, u, v, t_lo, t_hi, options.sample_step);
  }
  return exact_profile(graph, u, v, t_lo, t_hi, options.max_points);
}

}  // namespace tdinsert
