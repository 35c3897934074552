// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. `acceptance N` runs criterion N only.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "tdinsert/simbench.hpp"

namespace {

using namespace tdinsert;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

// 1 and 3 share the same instance stream.
struct EquivalenceStats {
  int instances = 0;
  int feasible = 0;
  int mismatches = 0;
  int invalid_routes = 0;
  int dominance_violations = 0;
  std::uint64_t cubic_queries_n8 = 0;
  std::uint64_t linear_queries_n8 = 0;
  double seconds = 0.0;
};

const EquivalenceStats& equivalence_suite() {
  static const EquivalenceStats stats = [] {
    EquivalenceStats s;
    const auto start = Clock::now();
    std::mt19937_64 rng(20240601);
    for (int trial = 0; trial < 1000; ++trial) {
      tdtest::InstanceShape shape;
      shape.vertices = trial % 10 == 0 ? 150 + rng() % 51 : 5 + rng() % 60;
      shape.chords = shape.vertices / 2 + rng() % (shape.vertices + 1);
      shape.breakpoints = 1 + rng() % 6;
      shape.stops = 2 * (rng() % 7);
      const auto inst = tdtest::random_instance(rng, shape);
      const auto& g = inst.graph;

      QueryCounter cc, qc, lc;
      const auto cubic = insert_cubic(inst.worker, inst.request, g, cc);
      const auto quad = insert_quadratic(tdtest::prepared(inst.worker, g, Algorithm::kQuadratic),
                                         inst.request, g, qc);
      const auto lin = insert_linear(tdtest::prepared(inst.worker, g, Algorithm::kLinear),
                                     inst.request, g, lc);
      ++s.instances;
      bool agree = quad.feasible == cubic.feasible && lin.feasible == cubic.feasible;
      if (agree && cubic.feasible) {
        ++s.feasible;
        agree = std::abs(quad.objective - cubic.objective) <= 1e-9 &&
                std::abs(lin.objective - cubic.objective) <= 1e-9;
        auto all = inst.assigned;
        all.push_back(inst.request);
        for (const auto* out : {&cubic, &quad, &lin}) {
          if (!verify_route(out->new_route, g, all, inst.worker).feasible()) ++s.invalid_routes;
        }
      }
      if (!agree) ++s.mismatches;

      const std::size_t n = inst.worker.route.n();
      if (n >= 2 && !(lin.point_queries_used <= quad.point_queries_used &&
                      quad.point_queries_used <= cubic.point_queries_used)) {
        ++s.dominance_violations;
      }
      if (n >= 8) {
        s.cubic_queries_n8 += cubic.point_queries_used;
        s.linear_queries_n8 += lin.point_queries_used;
      }
    }
    s.seconds = seconds_since(start);
    return s;
  }();
  return stats;
}

Verdict criterion_equivalence() {
  const auto& s = equivalence_suite();
  Verdict v;
  v.pass = s.instances >= 1000 && s.mismatches == 0 && s.invalid_routes == 0 &&
           s.seconds < 300.0;
  v.detail = fmt("%d instances (%d feasible), %d disagreements, %d invalid routes, %.1f s",
                 s.instances, s.feasible, s.mismatches, s.invalid_routes, s.seconds);
  return v;
}

Verdict criterion_brute_force() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> day(0, kDayEnd);
  int query_checks = 0, query_fail = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t v = 2 + rng() % 7;
    const auto g = tdtest::random_graph(rng, v, rng() % (2 * v + 1), 1 + rng() % 6, 600,
                                        trial % 4 != 0);
    QueryCounter c;
    for (int q = 0; q < 20; ++q) {
      const auto a = static_cast<VertexId>(rng() % v);
      const auto b = static_cast<VertexId>(rng() % v);
      const double t = day(rng);
      const auto got = query(g, a, b, t, c);
      const auto want = tdtest::enumerate_paths(g, a, b, t);
      ++query_checks;
      if (got.has_value() != want.has_value() ||
          (got && std::abs(*got - *want) > 1e-9)) {
        ++query_fail;
      }
    }
  }
  int insert_checks = 0, insert_fail = 0;
  for (int trial = 0; trial < 300; ++trial) {
    tdtest::InstanceShape shape;
    shape.vertices = 5 + rng() % 46;
    shape.chords = shape.vertices + rng() % shape.vertices;
    shape.stops = 2 * (rng() % 6);
    const auto inst = tdtest::random_instance(rng, shape);
    QueryCounter c;
    const auto got = insert_cubic(inst.worker, inst.request, inst.graph, c);
    const auto want =
        tdtest::brute_force_insert(inst.worker, inst.request, inst.graph, inst.assigned);
    ++insert_checks;
    if (got.feasible != want.feasible ||
        (got.feasible && std::abs(got.objective - want.objective) > 1e-9)) {
      ++insert_fail;
    }
  }
  Verdict v;
  v.pass = query_fail == 0 && insert_fail == 0;
  v.detail = fmt("%d/%d queries match path enumeration, %d/%d insertions match oracle",
                 query_checks - query_fail, query_checks, insert_checks - insert_fail,
                 insert_checks);
  return v;
}

Verdict criterion_dominance() {
  const auto& s = equivalence_suite();
  const double reduction =
      s.cubic_queries_n8 == 0
          ? 0.0
          : 1.0 - static_cast<double>(s.linear_queries_n8) / static_cast<double>(s.cubic_queries_n8);
  Verdict v;
  v.pass = s.dominance_violations == 0 && s.cubic_queries_n8 > 0 && reduction >= 0.5;
  v.detail = fmt("%d ordering violations, linear vs cubic reduction at n>=8: %.1f%%",
                 s.dominance_violations, 100.0 * reduction);
  return v;
}

Verdict criterion_worked_example() {
  // Worker at o1 with r1 on board, route <o1, o2, d2, d1>; new request goes
  // in at (1, 3).
  TdGraph g(6);
  for (VertexId a = 0; a < 6; ++a) {
    for (VertexId b = 0; b < 6; ++b) {
      if (a == b) continue;
      const double base = 60.0 * (1 + (a > b ? a - b : b - a));
      g.add_edge(a, b, PwlFunction({{0, base}, {30000, 2 * base}, {40000, base}, {86400, base}}));
    }
  }
  const Request r1{1, 0, 5, 28000, 40000, 1};
  const Request r2{2, 2, 3, 28000, 40000, 1};
  const Request r3{3, 1, 4, 28000, 40000, 1};
  Route route = Route::empty(r1.origin, 28800);
  route.stops.push_back(Stop::pickup(r2));
  route.stops.push_back(Stop::dropoff(r2));
  route.stops.push_back(Stop::dropoff(r1));
  const Worker base{0, r1.origin, 3, route};

  QueryCounter cubic, quad;
  const auto c = evaluate_candidate_cubic(tdtest::prepared(base, g, Algorithm::kCubic), r3, 1, 3,
                                          g, cubic);
  const auto q = evaluate_candidate_quadratic(tdtest::prepared(base, g, Algorithm::kQuadratic),
                                              r3, 1, 3, g, quad);
  Verdict v;
  v.pass = cubic.point_queries == 5 && quad.point_queries == 4 && c && q &&
           std::abs(*c - *q) <= 1e-9;
  v.detail = fmt("candidate (1,3): cubic %llu queries, quadratic %llu queries",
                 static_cast<unsigned long long>(cubic.point_queries),
                 static_cast<unsigned long long>(quad.point_queries));
  return v;
}

std::vector<ScalingPoint>& scaling_points(double& seconds) {
  static double elapsed = 0.0;
  static std::vector<ScalingPoint> points = [] {
    const auto start = Clock::now();
    NetworkSource source;
    const TdGraph g = build_network(source, 11);
    auto out = run_scaling_benchmark(g, ScalingConfig{});
    elapsed = seconds_since(start);
    return out;
  }();
  seconds = elapsed;
  return points;
}

Verdict criterion_complexity() {
  double seconds = 0.0;
  const auto& points = scaling_points(seconds);
  auto slope = [&](Algorithm a) {
    std::vector<double> x, y;
    for (const auto& p : points) {
      if (p.algorithm != a) continue;
      x.push_back(static_cast<double>(p.n));
      y.push_back(p.median_ns);
    }
    return loglog_slope(x, y);
  };
  const double cubic = slope(Algorithm::kCubic);
  const double quad = slope(Algorithm::kQuadratic);
  const double lin = slope(Algorithm::kLinear);
  Verdict v;
  v.pass = cubic >= 2.3 && quad >= 1.5 && quad <= 2.6 && lin <= 1.5 && seconds < 120.0;
  v.detail = fmt("slopes cubic %.2f, quadratic %.2f, linear %.2f over n=4..64, %.1f s", cubic,
                 quad, lin, seconds);
  return v;
}

Verdict criterion_space() {
  const TdGraph g = build_network(NetworkSource{}, 11);
  auto storage = [&](std::size_t n, CompoundMode mode) {
    std::size_t total = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto inst = make_scaling_instance(g, n, 7200.0, 100 + seed);
      QueryCounter c;
      init_arrays(inst.worker.route, g, c);
      build_compound(inst.worker.route, mode);
      total += inst.worker.route.compound_breakpoints();
    }
    return static_cast<double>(total);
  };
  const double pairs = storage(32, CompoundMode::kAllPairs) / storage(8, CompoundMode::kAllPairs);
  const double tails =
      storage(32, CompoundMode::kLegAndTail) / storage(8, CompoundMode::kLegAndTail);
  Verdict v;
  v.pass = pairs >= 10.0 && tails <= 5.0;
  v.detail = fmt("breakpoints n=32 vs n=8: all-pairs %.1fx, leg-and-tail %.1fx", pairs, tails);
  return v;
}

Verdict criterion_pwl() {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> unit(0, 1);
  int failures = 0;
  std::string first;
  auto fail = [&](const std::string& what) {
    if (failures++ == 0) first = what;
  };
  for (int pair = 0; pair < 10000; ++pair) {
    const double lo = 40000 * unit(rng);
    const double hi = lo + 1 + 40000 * unit(rng);
    const auto f = tdtest::random_fifo(rng, 1 + rng() % 10, lo, hi);
    const auto g = tdtest::random_fifo(rng, 2 + rng() % 9, lo - 500 * unit(rng), hi + 2000);
    const auto h = link(f, g);
    if (!fifo_check(h)) fail("link result not FIFO");
    const auto m = merge(f, g);
    if (!fifo_check(m)) fail("merge result not FIFO");
    const auto c = compact(h);
    const double mlo = std::max(f.domain_begin(), g.domain_begin());
    const double mhi = std::min(f.domain_end(), g.domain_end());
    for (int s = 0; s < 1000; ++s) {
      const double t = f.domain_begin() + (f.domain_end() - f.domain_begin()) * unit(rng);
      if (std::abs(h.eval(t) - (g.eval(f.arrival(t)) + f.eval(t))) > 1e-9) fail("composition");
      if (std::abs(c.eval(t) - h.eval(t)) > 1e-12) fail("compaction");
      if (mlo <= mhi) {
        const double tm = mlo + (mhi - mlo) * unit(rng);
        if (std::abs(m.eval(tm) - std::min(f.eval(tm), g.eval(tm))) > 1e-9) fail("merge");
      }
    }
    const double deadline = lo + (hi - lo + 1500) * unit(rng);
    const auto t = latest_departure(f, deadline);
    if (!t) {
      if (f.arrival(f.domain_begin()) <= deadline) fail("inversion missed a departure");
    } else {
      if (f.arrival(*t) > deadline + 1e-9) fail("inversion too late");
      const double later = *t + 1e-6;
      const bool flat = std::abs(f.arrival(later) - f.arrival(*t)) <= 1e-9;
      if (*t < f.domain_end() && !flat && f.arrival(later) <= deadline - 1e-6) {
        fail("inversion not maximal");
      }
    }
  }
  Verdict v;
  v.pass = failures == 0;
  v.detail = failures == 0 ? "10000 random pairs: composition, merge, inversion, FIFO closure, "
                             "compaction hold at 1e-9"
                           : fmt("%d failures, first: %s", failures, first.c_str());
  return v;
}

Verdict criterion_simulator() {
  SimConfig config;
  config.timing_repeats = 1;
  config.window_minutes = 15;
  config.request_count = 60;
  config.worker_count = 4;
  auto run = [&](Algorithm a) {
    SimConfig c = config;
    c.algorithm = a;
    return run_simulation(c);
  };
  auto assignments = [](const SimResult& r) {
    std::vector<std::optional<WorkerId>> out;
    for (const auto& rec : r.records) out.push_back(rec.assigned_worker);
    return out;
  };
  const auto cubic = run(Algorithm::kCubic);
  const auto cubic_again = run(Algorithm::kCubic);
  const auto quad = run(Algorithm::kQuadratic);
  const auto lin = run(Algorithm::kLinear);
  const auto lin_again = run(Algorithm::kLinear);

  bool deterministic = assignments(cubic) == assignments(cubic_again) &&
                       assignments(lin) == assignments(lin_again);
  bool conserved = true, verified = true;
  for (const auto* r : {&cubic, &quad, &lin}) {
    conserved = conserved && r->summary.served + r->summary.rejected == config.request_count &&
                r->records.size() == config.request_count;
    verified = verified && r->summary.verify_failures == 0;
  }
  const bool same = assignments(cubic) == assignments(lin) && assignments(cubic) == assignments(quad);
  Verdict v;
  v.pass = deterministic && conserved && verified && same && cubic.summary.served > 0;
  v.detail = fmt("deterministic %s, served+rejected=total %s, routes verify %s, cubic==linear "
                 "assignments %s (served %zu/%zu)",
                 deterministic ? "yes" : "no", conserved ? "yes" : "no", verified ? "yes" : "no",
                 same ? "yes" : "no", cubic.summary.served, config.request_count);
  return v;
}

struct Criterion {
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"cross-algorithm equivalence", criterion_equivalence},
      {"brute-force oracles", criterion_brute_force},
      {"query-count dominance", criterion_dominance},
      {"worked-example query counts", criterion_worked_example},
      {"complexity trend", criterion_complexity},
      {"space contrast", criterion_space},
      {"pwl algebra suite", criterion_pwl},
      {"simulator determinism and soundness", criterion_simulator},
  };
  std::vector<std::size_t> selected;
  for (int a = 1; a < argc; ++a) selected.push_back(std::strtoul(argv[a], nullptr, 10));
  if (selected.empty()) {
    for (std::size_t i = 1; i <= criteria.size(); ++i) selected.push_back(i);
  }

  bool all = true;
  for (std::size_t id : selected) {
    if (id < 1 || id > criteria.size()) {
      std::fprintf(stderr, "unknown criterion %zu\n", id);
      return 2;
    }
    const auto& c = criteria[id - 1];
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    all = all && v.pass;
    std::printf("%s criterion %zu (%s): %s\n", v.pass ? "PASS" : "FAIL", id, c.name,
                v.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
