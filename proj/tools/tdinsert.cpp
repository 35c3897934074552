#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "tdinsert/simbench.hpp"

namespace {

using namespace tdinsert;

std::map<std::string, Algorithm> algorithm_map() {
  return {{"cubic", Algorithm::kCubic},
          {"quadratic", Algorithm::kQuadratic},
          {"linear", Algorithm::kLinear}};
}

void add_network_options(CLI::App& app, SimConfig& config, std::string& network) {
  auto* path = app.add_option("--network", network, "Network file (V E header, one edge per line)");
  app.add_option("--gen-vertices", config.network.vertices, "Generated network size")
      ->check(CLI::PositiveNumber)
      ->excludes(path);
  app.add_option("--gen-degree", config.network.avg_degree, "Generated average out-degree")
      ->check(CLI::PositiveNumber)
      ->excludes(path);
  app.add_option("--gen-breakpoints", config.network.breakpoints,
                 "Breakpoints per generated edge function")
      ->check(CLI::PositiveNumber)
      ->excludes(path);
  app.add_option("--gen-weight-min", config.network.synthetic.base_weight_min,
                 "Lower bound of generated base edge weights (s)")
      ->check(CLI::PositiveNumber)
      ->excludes(path);
  app.add_option("--gen-weight-max", config.network.synthetic.base_weight_max,
                 "Upper bound of generated base edge weights (s)")
      ->check(CLI::PositiveNumber)
      ->excludes(path);
  app.add_flag("--repair-fifo", config.network.repair_fifo,
               "Repair FIFO violations in the network file instead of failing");
}

void add_sim_options(CLI::App& app, SimConfig& config) {
  app.add_option("--workers", config.worker_count, "Number of workers")
      ->check(CLI::PositiveNumber);
  app.add_option("--capacity", config.capacity, "Worker capacity")->check(CLI::PositiveNumber);
  app.add_option("--window-min", config.window_minutes,
                 "Minutes between release and deadline")
      ->check(CLI::PositiveNumber);
  app.add_option("--requests", config.request_count, "Number of generated requests")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", config.seed, "Random seed");
  app.add_option("--repeats", config.timing_repeats, "Timing repeats per probe (median)")
      ->check(CLI::PositiveNumber);
}

void print_summary(const SimSummary& s) {
  std::cout << "requests " << s.requests << ", served " << s.served << ", rejected "
            << s.rejected << " (served ratio " << s.served_ratio() << ")\n"
            << "mean point queries " << s.mean_point_queries << ", mean insertion "
            << s.mean_insertion_ns << " ns, mean response " << s.mean_response_ns
            << " ns\n"
            << "compound breakpoints final " << s.final_compound_breakpoints
            << ", peak " << s.peak_compound_breakpoints << "\n";
  if (s.verify_failures > 0) {
    std::cout << "verify failures " << s.verify_failures << "\n";
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Request insertion over time-dependent road networks"};
  app.require_subcommand(1);

  SimConfig run_config;
  std::string run_network;
  std::string run_requests;
  std::string run_workers;
  std::string metrics_out;
  auto* run = app.add_subcommand("run", "Replay a request stream and write per-request metrics");
  run->add_option("--algorithm", run_config.algorithm, "cubic, quadratic or linear")
      ->required()
      ->transform(CLI::CheckedTransformer(algorithm_map(), CLI::ignore_case));
  add_network_options(*run, run_config, run_network);
  add_sim_options(*run, run_config);
  run->add_option("--requests-file", run_requests,
                  "CSV id,origin,destination,release_time,deadline,passengers")
      ->check(CLI::ExistingFile);
  run->add_option("--workers-file", run_workers, "CSV id,start_vertex,capacity")
      ->check(CLI::ExistingFile);
  run->add_option("--metrics-out", metrics_out, "Metrics CSV path")->required();

  SimConfig bench_config;
  std::string bench_network;
  std::string sweep_name;
  std::string bench_out;
  std::vector<double> sweep_values;
  std::vector<std::size_t> sizes;
  auto* bench = app.add_subcommand("bench", "Run a parameter sweep for all three algorithms");
  bench->add_option("--sweep", sweep_name, "capacity, window, requests, workers or nscale")
      ->required()
      ->check(CLI::IsMember({"capacity", "window", "requests", "workers", "nscale"}));
  bench->add_option("--values", sweep_values, "Override the swept values");
  bench->add_option("--sizes", sizes, "Route sizes for the nscale sweep");
  add_network_options(*bench, bench_config, bench_network);
  add_sim_options(*bench, bench_config);
  bench->add_option("--out", bench_out, "Aggregated CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (!run_network.empty()) run_config.network.path = run_network;
      if (!run_requests.empty()) run_config.requests_path = run_requests;
      if (!run_workers.empty()) run_config.workers_path = run_workers;
      run_config.metrics_out = metrics_out;
      print_summary(run_simulation(run_config).summary);
      return 0;
    }

    if (!bench_network.empty()) bench_config.network.path = bench_network;
    if (sweep_name == "nscale") {
      const TdGraph graph = build_network(bench_config.network, bench_config.seed);
      ScalingConfig scaling;
      if (!sizes.empty()) scaling.sizes = sizes;
      scaling.repeats = bench_config.timing_repeats;
      scaling.seed = bench_config.seed;
      const auto points = run_scaling_benchmark(graph, scaling);
      auto out = open_output(bench_out);
      write_scaling_csv(out, points);
      for (Algorithm a : scaling.algorithms) {
        std::vector<double> x, y;
        for (const auto& p : points) {
          if (p.algorithm != a) continue;
          x.push_back(static_cast<double>(p.n));
          y.push_back(p.median_ns);
        }
        std::cout << to_string(a) << " log-log slope " << loglog_slope(x, y) << "\n";
      }
      return 0;
    }

    BenchConfig config;
    config.base = bench_config;
    config.sweep = *parse_sweep(sweep_name);
    config.values = sweep_values;
    const auto rows = run_benchmark_suite(config);
    auto out = open_output(bench_out);
    write_bench_csv(out, rows);
    std::cout << rows.size() << " rows written to " << bench_out << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "tdinsert: " << e.what() << "\n";
    return 1;
  }
}
