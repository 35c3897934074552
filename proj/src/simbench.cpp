#include "tdinsert/simbench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>

namespace tdinsert {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t ns_since(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start)
      .count();
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(field);
  }
  return out;
}

template <typename T>
T parse_field(const std::string& text, const std::filesystem::path& path,
              std::size_t line) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(path.string() + ":" + std::to_string(line) +
                      ": malformed field '" + text + "'");
  }
  return value;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               const std::string& header,
                                               std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) {
    throw ConfigError(path.string() + ": expected header '" + header + "'");
  }
  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split_csv(line);
    if (fields.size() != columns) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": expected " + std::to_string(columns) + " fields");
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

std::vector<char> reachable_from(const TdGraph& graph, VertexId source) {
  std::vector<char> seen(graph.vertex_count(), 0);
  std::vector<VertexId> stack{source};
  seen[source] = 1;
  while (!stack.empty()) {
    const VertexId u = stack.back();
    stack.pop_back();
    for (const auto& e : graph.out_edges(u)) {
      if (!seen[e.head]) {
        seen[e.head] = 1;
        stack.push_back(e.head);
      }
    }
  }
  return seen;
}

double median(std::vector<std::int64_t> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return static_cast<double>(values[mid]);
  return 0.5 * static_cast<double>(values[mid - 1] + values[mid]);
}

// A worker plus the requests its route still has to deliver.
struct Fleet {
  Worker worker;
  std::vector<Request> assigned;
};

ArrayOptions array_options(const SimConfig& config) {
  ArrayOptions options;
  options.with_latest = config.algorithm != Algorithm::kCubic;
  options.profile = config.profile;
  return options;
}

void prepare_route(Route& route, const TdGraph& graph, const SimConfig& config,
                   QueryCounter& counter) {
  init_arrays(route, graph, counter, array_options(config));
  if (config.algorithm != Algorithm::kCubic) {
    build_compound(route, compound_mode_for(config.algorithm));
  }
}

// Drops everything the worker has already done by `now`. A worker that is
// between stops stays committed to the next one, which becomes the new v_0.
void advance(Fleet& fleet, double now, const TdGraph& graph,
             const SimConfig& config, QueryCounter& counter) {
  Route& route = fleet.worker.route;
  if (route.start_time > now) return;
  const std::size_t n = route.n();
  std::size_t m = 1;
  while (m <= n && route.arr[m] <= now) ++m;

  if (m > n) {
    fleet.assigned.clear();
    route = Route::empty(route.stops[n].vertex, now);
    prepare_route(route, graph, config, counter);
    return;
  }

  std::vector<RequestId> finished;
  for (std::size_t k = 1; k <= m; ++k) {
    if (route.stops[k].kind == StopKind::kDropoff) {
      finished.push_back(route.stops[k].request);
    }
  }
  std::erase_if(fleet.assigned, [&](const Request& r) {
    return std::find(finished.begin(), finished.end(), r.id) != finished.end();
  });

  Route next;
  next.stops.push_back(Stop::start(route.stops[m].vertex));
  next.stops.insert(next.stops.end(), route.stops.begin() + m + 1, route.stops.end());
  next.start_time = route.arr[m];
  next.arr.assign(route.arr.begin() + m, route.arr.end());
  next.num.assign(route.num.begin() + m, route.num.end());
  if (route.has_latest()) {
    next.latest.assign(route.latest.begin() + m, route.latest.end());
    next.leg_fn.assign(route.leg_fn.begin() + m, route.leg_fn.end());
  }
  next.compound = route.compound;
  if (route.compound == CompoundMode::kLegAndTail) {
    next.tail_fn.assign(route.tail_fn.begin() + m, route.tail_fn.end());
  } else if (route.compound == CompoundMode::kAllPairs) {
    next.pair_fn.assign(route.pair_fn.begin() + m, route.pair_fn.end());
  }
  route = std::move(next);
}

std::size_t fleet_breakpoints(const std::vector<Fleet>& fleet) {
  std::size_t total = 0;
  for (const auto& f : fleet) total += f.worker.route.compound_breakpoints();
  return total;
}

}  // namespace

void SimConfig::validate() const {
  if (worker_count < 1) throw ConfigError("worker count must be >= 1");
  if (capacity < 1) throw ConfigError("capacity must be >= 1");
  if (request_count < 1) throw ConfigError("request count must be >= 1");
  if (!(window_minutes > 0.0)) throw ConfigError("deadline window must be > 0");
  if (timing_repeats < 1) throw ConfigError("timing repeats must be >= 1");
  if (!(release_begin <= release_end)) {
    throw ConfigError("release window is empty");
  }
  if (!network.path && network.vertices < 2) {
    throw ConfigError("generated network needs >= 2 vertices");
  }
}

TdGraph build_network(const NetworkSource& source, std::uint64_t seed) {
  if (source.path) {
    return load_network(*source.path, LoadOptions{source.repair_fifo});
  }
  return generate_synthetic(source.vertices, source.avg_degree,
                            source.breakpoints, seed, source.synthetic);
}

std::vector<Request> generate_requests(const TdGraph& graph,
                                       const SimConfig& config) {
  std::mt19937_64 rng(config.seed * 0x9E3779B97F4A7C15ULL + 1);
  std::uniform_int_distribution<VertexId> vertex(
      0, static_cast<VertexId>(graph.vertex_count() - 1));
  std::uniform_real_distribution<double> release(config.release_begin,
                                                 config.release_end);
  const bool connected = strongly_connected(graph);

  std::vector<Request> requests;
  requests.reserve(config.request_count);
  while (requests.size() < config.request_count) {
    Request r;
    r.origin = vertex(rng);
    r.destination = vertex(rng);
    if (r.origin == r.destination) continue;
    if (!connected && !reachable_from(graph, r.origin)[r.destination]) continue;
    r.release_time = release(rng);
    r.deadline = r.release_time + config.window_minutes * 60.0;
    r.passengers = 1;
    requests.push_back(r);
  }
  std::stable_sort(requests.begin(), requests.end(),
                   [](const Request& a, const Request& b) {
                     return a.release_time < b.release_time;
                   });
  for (std::size_t i = 0; i < requests.size(); ++i) {
    requests[i].id = static_cast<RequestId>(i);
  }
  return requests;
}

std::vector<Worker> generate_workers(const TdGraph& graph,
                                     const SimConfig& config) {
  std::mt19937_64 rng(config.seed * 0xD1B54A32D192ED03ULL + 2);
  std::uniform_int_distribution<VertexId> vertex(
      0, static_cast<VertexId>(graph.vertex_count() - 1));
  std::vector<Worker> workers;
  for (std::size_t w = 0; w < config.worker_count; ++w) {
    workers.push_back(Worker::idle(static_cast<WorkerId>(w), vertex(rng),
                                   config.capacity, config.release_begin));
  }
  return workers;
}

std::vector<Request> load_requests_csv(const std::filesystem::path& path) {
  auto rows = read_csv(path, "id,origin,destination,release_time,deadline,passengers", 6);
  std::vector<Request> requests;
  std::size_t line = 1;
  for (const auto& f : rows) {
    ++line;
    Request r;
    r.id = parse_field<RequestId>(f[0], path, line);
    r.origin = parse_field<VertexId>(f[1], path, line);
    r.destination = parse_field<VertexId>(f[2], path, line);
    r.release_time = parse_field<double>(f[3], path, line);
    r.deadline = parse_field<double>(f[4], path, line);
    r.passengers = parse_field<int>(f[5], path, line);
    try {
      validate_request(r);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
    requests.push_back(r);
  }
  std::stable_sort(requests.begin(), requests.end(),
                   [](const Request& a, const Request& b) {
                     return a.release_time < b.release_time;
                   });
  return requests;
}

std::vector<Worker> load_workers_csv(const std::filesystem::path& path) {
  auto rows = read_csv(path, "id,start_vertex,capacity", 3);
  std::vector<Worker> workers;
  std::size_t line = 1;
  for (const auto& f : rows) {
    ++line;
    const auto id = parse_field<WorkerId>(f[0], path, line);
    const auto start = parse_field<VertexId>(f[1], path, line);
    const auto capacity = parse_field<int>(f[2], path, line);
    if (capacity < 1) {
      throw ConfigError(path.string() + ":" + std::to_string(line) +
                        ": capacity must be >= 1");
    }
    workers.push_back(Worker::idle(id, start, capacity, 0.0));
  }
  std::sort(workers.begin(), workers.end(),
            [](const Worker& a, const Worker& b) { return a.id < b.id; });
  return workers;
}

SimResult run_simulation(const SimConfig& config, const TdGraph& graph,
                         std::vector<Request> requests,
                         std::vector<Worker> workers) {
  config.validate();
  for (const auto& r : requests) {
    validate_request(r);
    if (!graph.valid(r.origin) || !graph.valid(r.destination)) {
      throw ConfigError("request " + std::to_string(r.id) + " uses an unknown vertex");
    }
  }
  std::vector<Fleet> fleet;
  QueryCounter upkeep;  // route maintenance, reported separately
  for (auto& w : workers) {
    if (!graph.valid(w.start_vertex)) {
      throw ConfigError("worker " + std::to_string(w.id) + " starts at an unknown vertex");
    }
    w.route = Route::empty(w.start_vertex, w.route.start_time);
    prepare_route(w.route, graph, config, upkeep);
    fleet.push_back({std::move(w), {}});
  }

  SimResult result;
  result.records.reserve(requests.size());
  for (const Request& request : requests) {
    const double now = request.release_time;
    MetricsRecord record;
    record.request_id = request.id;
    record.algorithm = config.algorithm;

    const auto advance_start = Clock::now();
    for (auto& f : fleet) advance(f, now, graph, config, upkeep);
    std::int64_t overhead_ns = ns_since(advance_start);

    std::optional<std::size_t> chosen;
    double chosen_delta = 0.0;
    InsertionOutcome chosen_outcome;
    for (std::size_t w = 0; w < fleet.size(); ++w) {
      const Worker& worker = fleet[w].worker;
      QueryCounter counter;
      InsertionOutcome outcome = insert(config.algorithm, worker, request, graph, counter);
      std::vector<std::int64_t> samples{outcome.elapsed.count()};
      for (int rep = 1; rep < config.timing_repeats; ++rep) {
        QueryCounter scratch;
        samples.push_back(
            insert(config.algorithm, worker, request, graph, scratch).elapsed.count());
      }
      record.point_queries += outcome.point_queries_used;
      record.insertion_ns += static_cast<std::int64_t>(median(std::move(samples)));
      if (!outcome.feasible) continue;
      const double delta = outcome.objective - worker.route.makespan();
      if (!chosen || delta < chosen_delta - kTimeEps) {
        chosen = w;
        chosen_delta = delta;
        chosen_outcome = std::move(outcome);
      }
    }

    const auto commit_start = Clock::now();
    if (chosen) {
      Fleet& f = fleet[*chosen];
      Route route = std::move(chosen_outcome.new_route);
      prepare_route(route, graph, config, upkeep);
      f.worker.route = std::move(route);
      f.assigned.push_back(request);
      record.assigned_worker = f.worker.id;
      record.objective_delta = chosen_delta;
      ++result.summary.served;
      if (config.verify_commits &&
          !verify_route(f.worker.route, graph, f.assigned, f.worker).feasible()) {
        ++result.summary.verify_failures;
      }
    } else {
      ++result.summary.rejected;
    }
    overhead_ns += ns_since(commit_start);

    record.response_ns = record.insertion_ns + overhead_ns;
    record.compound_breakpoints = fleet_breakpoints(fleet);
    result.summary.peak_compound_breakpoints =
        std::max(result.summary.peak_compound_breakpoints, record.compound_breakpoints);
    result.records.push_back(record);
  }

  auto& s = result.summary;
  s.requests = requests.size();
  for (const auto& r : result.records) {
    s.total_point_queries += r.point_queries;
    s.mean_insertion_ns += static_cast<double>(r.insertion_ns);
    s.mean_response_ns += static_cast<double>(r.response_ns);
  }
  if (s.requests > 0) {
    const auto count = static_cast<double>(s.requests);
    s.mean_point_queries = static_cast<double>(s.total_point_queries) / count;
    s.mean_insertion_ns /= count;
    s.mean_response_ns /= count;
  }
  s.final_compound_breakpoints = fleet_breakpoints(fleet);
  return result;
}

SimResult run_simulation(const SimConfig& config) {
  config.validate();
  const TdGraph graph = build_network(config.network, config.seed);
  auto requests = config.requests_path ? load_requests_csv(*config.requests_path)
                                       : generate_requests(graph, config);
  auto workers = config.workers_path ? load_workers_csv(*config.workers_path)
                                     : generate_workers(graph, config);
  SimResult result = run_simulation(config, graph, std::move(requests), std::move(workers));
  if (config.metrics_out) {
    std::ofstream out(*config.metrics_out);
    if (!out) throw ConfigError("cannot write " + config.metrics_out->string());
    write_metrics_csv(out, result);
  }
  return result;
}

void write_metrics_csv(std::ostream& out, const SimResult& result) {
  out << kMetricsHeader << '\n';
  for (const auto& r : result.records) {
    out << r.request_id << ',' << to_string(r.algorithm) << ',';
    if (r.assigned_worker) {
      out << *r.assigned_worker << ',' << format_double(r.objective_delta);
    } else {
      out << "NONE,";
    }
    out << ',' << r.point_queries << ',' << r.insertion_ns << ','
        << r.response_ns << ',' << r.compound_breakpoints << '\n';
  }
  const auto& s = result.summary;
  out << "# requests=" << s.requests << '\n'
      << "# served=" << s.served << '\n'
      << "# rejected=" << s.rejected << '\n'
      << "# served_ratio=" << format_double(s.served_ratio()) << '\n'
      << "# total_point_queries=" << s.total_point_queries << '\n'
      << "# mean_point_queries=" << format_double(s.mean_point_queries) << '\n'
      << "# mean_insertion_ns=" << format_double(s.mean_insertion_ns) << '\n'
      << "# mean_response_ns=" << format_double(s.mean_response_ns) << '\n'
      << "# final_compound_breakpoints=" << s.final_compound_breakpoints << '\n'
      << "# peak_compound_breakpoints=" << s.peak_compound_breakpoints << '\n'
      << "# verify_failures=" << s.verify_failures << '\n';
}

const char* to_string(Sweep sweep) {
  switch (sweep) {
    case Sweep::kCapacity:
      return "capacity";
    case Sweep::kWindow:
      return "window";
    case Sweep::kRequests:
      return "requests";
    case Sweep::kWorkers:
      return "workers";
  }
  return "unknown";
}

std::optional<Sweep> parse_sweep(std::string_view name) {
  if (name == "capacity") return Sweep::kCapacity;
  if (name == "window") return Sweep::kWindow;
  if (name == "requests") return Sweep::kRequests;
  if (name == "workers") return Sweep::kWorkers;
  return std::nullopt;
}

std::vector<double> default_sweep_values(Sweep sweep) {
  switch (sweep) {
    case Sweep::kCapacity:
      return {3, 5, 10, 15, 20};
    case Sweep::kWindow:
      return {10, 15, 20, 25, 30};
    case Sweep::kRequests:
      return {20, 40, 60, 80, 100};
    case Sweep::kWorkers:
      return {2, 4, 6, 8, 10};
  }
  return {};
}

std::vector<BenchRow> run_benchmark_suite(const BenchConfig& config) {
  const auto values =
      config.values.empty() ? default_sweep_values(config.sweep) : config.values;
  const TdGraph graph = build_network(config.base.network, config.base.seed);
  std::vector<BenchRow> rows;
  for (double value : values) {
    SimConfig sim = config.base;
    switch (config.sweep) {
      case Sweep::kCapacity:
        sim.capacity = static_cast<int>(value);
        break;
      case Sweep::kWindow:
        sim.window_minutes = value;
        break;
      case Sweep::kRequests:
        sim.request_count = static_cast<std::size_t>(value);
        break;
      case Sweep::kWorkers:
        sim.worker_count = static_cast<std::size_t>(value);
        break;
    }
    sim.metrics_out.reset();
    auto requests = sim.requests_path ? load_requests_csv(*sim.requests_path)
                                      : generate_requests(graph, sim);
    auto workers = sim.workers_path ? load_workers_csv(*sim.workers_path)
                                    : generate_workers(graph, sim);
    for (Algorithm algorithm : config.algorithms) {
      sim.algorithm = algorithm;
      SimResult result = run_simulation(sim, graph, requests, workers);
      BenchRow row;
      row.sweep = config.sweep;
      row.value = value;
      row.algorithm = algorithm;
      row.mean_point_queries = result.summary.mean_point_queries;
      row.mean_insertion_ns = result.summary.mean_insertion_ns;
      row.mean_response_ns = result.summary.mean_response_ns;
      row.total_compound_breakpoints = result.summary.peak_compound_breakpoints;
      row.served_ratio = result.summary.served_ratio();
      rows.push_back(row);
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "sweep,value,algorithm,mean_point_queries,mean_insertion_ns,"
         "mean_response_ns,total_compound_breakpoints,served_ratio\n";
  for (const auto& r : rows) {
    out << to_string(r.sweep) << ',' << format_double(r.value) << ','
        << to_string(r.algorithm) << ',' << format_double(r.mean_point_queries)
        << ',' << format_double(r.mean_insertion_ns) << ','
        << format_double(r.mean_response_ns) << ',' << r.total_compound_breakpoints
        << ',' << format_double(r.served_ratio) << '\n';
  }
}

ScalingInstance make_scaling_instance(const TdGraph& graph, std::size_t n,
                                      double slack, std::uint64_t seed) {
  if (n % 2 != 0) {
    throw ConfigError("scaling route length must be even");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<VertexId> vertex(
      0, static_cast<VertexId>(graph.vertex_count() - 1));
  auto distinct_pair = [&] {
    VertexId a = vertex(rng);
    VertexId b = vertex(rng);
    while (b == a) b = vertex(rng);
    return std::pair{a, b};
  };

  constexpr double kStart = 28800.0;
  std::vector<Request> requests;
  Route route = Route::empty(vertex(rng), kStart);
  for (std::size_t r = 0; r < n / 2; ++r) {
    auto [o, d] = distinct_pair();
    requests.push_back({static_cast<RequestId>(r), o, d, kStart - 1.0, kDayEnd, 1});
  }
  for (std::size_t b = 0; b < requests.size(); b += 2) {
    if (b + 1 < requests.size()) {
      const Request& a = requests[b];
      const Request& c = requests[b + 1];
      route.stops.push_back(Stop::pickup(a));
      route.stops.push_back(Stop::pickup(c));
      route.stops.push_back(Stop::dropoff(c));
      route.stops.push_back(Stop::dropoff(a));
    } else {
      route.stops.push_back(Stop::pickup(requests[b]));
      route.stops.push_back(Stop::dropoff(requests[b]));
    }
  }

  QueryCounter counter;
  init_arrays(route, graph, counter, ArrayOptions{.with_latest = false, .profile = {}});
  for (std::size_t k = 1; k <= route.n(); ++k) {
    if (route.stops[k].kind == StopKind::kDropoff) {
      route.stops[k].deadline = route.arr[k] + slack;
      requests[route.stops[k].request].deadline = route.stops[k].deadline;
    }
  }
  for (auto& s : route.stops) {
    if (s.kind == StopKind::kPickup) s.deadline = requests[s.request].deadline;
  }

  ScalingInstance instance;
  instance.worker = Worker{0, route.stops.front().vertex, 4, std::move(route)};
  auto [o, d] = distinct_pair();
  instance.request = {static_cast<RequestId>(requests.size()), o, d, kStart - 1.0,
                      instance.worker.route.makespan() + slack, 1};
  return instance;
}

std::vector<ScalingPoint> run_scaling_benchmark(const TdGraph& graph,
                                                const ScalingConfig& config) {
  std::vector<ScalingPoint> points;
  for (std::size_t n : config.sizes) {
    const ScalingInstance base = make_scaling_instance(graph, n, config.slack, config.seed + n);
    for (Algorithm algorithm : config.algorithms) {
      Worker worker = base.worker;
      QueryCounter upkeep;
      init_arrays(worker.route, graph, upkeep,
                  ArrayOptions{.with_latest = algorithm != Algorithm::kCubic, .profile = {}});
      if (algorithm != Algorithm::kCubic) {
        build_compound(worker.route, compound_mode_for(algorithm));
      }
      ScalingPoint point;
      point.algorithm = algorithm;
      point.n = n;
      point.compound_breakpoints = worker.route.compound_breakpoints();
      std::vector<std::int64_t> samples;
      for (int rep = 0; rep < config.repeats; ++rep) {
        QueryCounter counter;
        auto outcome = insert(algorithm, worker, base.request, graph, counter);
        samples.push_back(outcome.elapsed.count());
        if (rep == 0) {
          point.point_queries = outcome.point_queries_used;
          point.objective = outcome.objective;
        }
      }
      point.median_ns = median(std::move(samples));
      points.push_back(point);
    }
  }
  return points;
}

void write_scaling_csv(std::ostream& out, const std::vector<ScalingPoint>& rows) {
  out << "algorithm,n,median_ns,point_queries,compound_breakpoints,objective\n";
  for (const auto& r : rows) {
    out << to_string(r.algorithm) << ',' << r.n << ',' << format_double(r.median_ns)
        << ',' << r.point_queries << ',' << r.compound_breakpoints << ','
        << format_double(r.objective) << '\n';
  }
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("loglog_slope needs >= 2 paired samples");
  }
  const auto count = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

}  // namespace tdinsert
