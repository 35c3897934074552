#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tdinsert/insertion.hpp"

namespace tdinsert {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NetworkSource {
  std::optional<std::filesystem::path> path;  // overrides the generator
  std::size_t vertices = 200;
  double avg_degree = 2.5;
  std::size_t breakpoints = 6;
  /// Shorter edges than the generator default so that trips fit the
  /// desk-scale deadline windows.
  SyntheticOptions synthetic{10.0, 60.0, 1.0, 3.0};
  bool repair_fifo = false;
};

struct SimConfig {
  Algorithm algorithm = Algorithm::kLinear;
  std::size_t worker_count = 5;
  int capacity = 5;
  double window_minutes = 15.0;
  std::size_t request_count = 40;
  std::uint64_t seed = 1;
  NetworkSource network;
  std::optional<std::filesystem::path> requests_path;
  std::optional<std::filesystem::path> workers_path;
  std::optional<std::filesystem::path> metrics_out;

  double release_begin = 28800.0;
  double release_end = 64800.0;
  /// Each probe is timed this many times; the median is reported.
  int timing_repeats = 5;
  /// Re-verify every committed route from scratch.
  bool verify_commits = true;
  ProfileOptions profile;

  void validate() const;
};

/// Per-request dispatch telemetry.
struct MetricsRecord {
  RequestId request_id = 0;
  Algorithm algorithm = Algorithm::kLinear;
  std::optional<WorkerId> assigned_worker;
  double objective_delta = 0.0;  // meaningful only when assigned
  std::uint64_t point_queries = 0;
  std::int64_t insertion_ns = 0;
  std::int64_t response_ns = 0;
  std::size_t compound_breakpoints = 0;
};

struct SimSummary {
  std::size_t requests = 0;
  std::size_t served = 0;
  std::size_t rejected = 0;
  std::uint64_t total_point_queries = 0;
  double mean_point_queries = 0.0;
  double mean_insertion_ns = 0.0;
  double mean_response_ns = 0.0;
  std::size_t final_compound_breakpoints = 0;
  std::size_t peak_compound_breakpoints = 0;
  std::size_t verify_failures = 0;

  double served_ratio() const {
    return requests == 0 ? 0.0 : static_cast<double>(served) / requests;
  }
};

struct SimResult {
  std::vector<MetricsRecord> records;
  SimSummary summary;
};

/// Uniform origin/destination pairs (distinct, reachable) with release
/// times uniform over [release_begin, release_end], sorted by release.
std::vector<Request> generate_requests(const TdGraph& graph,
                                       const SimConfig& config);
std::vector<Worker> generate_workers(const TdGraph& graph,
                                     const SimConfig& config);

std::vector<Request> load_requests_csv(const std::filesystem::path& path);
std::vector<Worker> load_workers_csv(const std::filesystem::path& path);

TdGraph build_network(const NetworkSource& source, std::uint64_t seed);

/// Replays requests in release order, probing every worker and committing
/// the insertion with the smallest makespan increase.
SimResult run_simulation(const SimConfig& config, const TdGraph& graph,
                         std::vector<Request> requests,
                         std::vector<Worker> workers);

/// Builds the network, requests and workers from `config`, runs, and
/// writes the metrics file when `config.metrics_out` is set.
SimResult run_simulation(const SimConfig& config);

inline constexpr const char* kMetricsHeader =
    "request_id,algorithm,assigned_worker,objective_delta,point_queries,"
    "insertion_ns,response_ns,compound_breakpoints";

void write_metrics_csv(std::ostream& out, const SimResult& result);

// ---------------------------------------------------------------------------
// Benchmark sweeps

enum class Sweep { kCapacity, kWindow, kRequests, kWorkers };

const char* to_string(Sweep sweep);
std::optional<Sweep> parse_sweep(std::string_view name);
/// Desk-scale values for each sweep.
std::vector<double> default_sweep_values(Sweep sweep);

struct BenchConfig {
  SimConfig base;
  Sweep sweep = Sweep::kCapacity;
  std::vector<double> values;  // empty: default_sweep_values(sweep)
  std::vector<Algorithm> algorithms{Algorithm::kCubic, Algorithm::kQuadratic,
                                    Algorithm::kLinear};
};

struct BenchRow {
  Sweep sweep = Sweep::kCapacity;
  double value = 0.0;
  Algorithm algorithm = Algorithm::kLinear;
  double mean_point_queries = 0.0;
  double mean_insertion_ns = 0.0;
  double mean_response_ns = 0.0;
  std::size_t total_compound_breakpoints = 0;
  double served_ratio = 0.0;
};

std::vector<BenchRow> run_benchmark_suite(const BenchConfig& config);
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

// ---------------------------------------------------------------------------
// Single-route scaling

struct ScalingInstance {
  Worker worker;  // route with arrays, no compound functions yet
  Request request;
};

/// Route of n stops built from n/2 requests in <o_a, o_b, d_b, d_a> blocks,
/// each request's deadline set `slack` seconds after its planned delivery.
/// The new request is given the same slack relative to the route end.
ScalingInstance make_scaling_instance(const TdGraph& graph, std::size_t n,
                                      double slack, std::uint64_t seed);

struct ScalingPoint {
  Algorithm algorithm = Algorithm::kLinear;
  std::size_t n = 0;
  double median_ns = 0.0;
  std::uint64_t point_queries = 0;
  std::size_t compound_breakpoints = 0;
  double objective = 0.0;
};

struct ScalingConfig {
  std::vector<std::size_t> sizes{4, 8, 16, 32, 64};
  std::vector<Algorithm> algorithms{Algorithm::kCubic, Algorithm::kQuadratic,
                                    Algorithm::kLinear};
  double slack = 7200.0;
  int repeats = 5;
  std::uint64_t seed = 11;
};

std::vector<ScalingPoint> run_scaling_benchmark(const TdGraph& graph,
                                                const ScalingConfig& config);
void write_scaling_csv(std::ostream& out, const std::vector<ScalingPoint>& rows);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace tdinsert
