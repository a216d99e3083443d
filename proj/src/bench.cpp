#include "knotflow/bench.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "knotflow/error.hpp"
#include "knotflow/io.hpp"

namespace knotflow {

std::string bench_cell_name(const std::string& input, Method method, MetricType metric) {
  std::string name = std::filesystem::path(input).filename().string();
  for (char& c : name)
    if (c == ':' || c == '/' || c == ' ' || c == ',') c = '-';
  return name + "_" + std::string(to_string(method)) + "_" + std::string(to_string(metric));
}

std::vector<BenchRow> run_bench(const BenchConfig& config) {
  if (config.inputs.empty() || config.methods.empty() || config.metrics.empty())
    fail(ErrorKind::InvalidArgument, "bench grid needs inputs, methods and metrics");
  std::filesystem::create_directories(config.out_dir);
  const std::filesystem::path dir(config.out_dir);

  std::vector<BenchRow> rows;
  for (const std::string& input : config.inputs) {
    const Polygon start = make_input(input, config.seed);
    for (Method method : config.methods) {
      for (MetricType metric : config.metrics) {
        BenchRow row;
        row.cell = bench_cell_name(input, method, metric);
        try {
          OptimizerConfig cfg;
          cfg.method = method;
          cfg.metric.type = metric;
          cfg.alpha = config.alpha;
          cfg.max_iter = config.max_iter;
          cfg.time_budget = config.budget_s;
          const RunResult run = optimize(start, cfg);
          save_trace((dir / (row.cell + ".csv")).string(), run.trace);
          row.final_energy = run.trace.back().energy;
          row.iterations = run.trace.back().iter;
          row.seconds = run.trace.back().time_s;
          row.status = std::string(to_string(run.status));
        } catch (const Error& e) {
          row.status = "error:" + std::string(to_string(e.kind()));
        }
        rows.push_back(row);
      }
    }
  }

  std::ofstream summary(dir / "summary.csv");
  summary << "cell,final_energy,iterations,seconds,status\n";
  char buf[64];
  for (const BenchRow& r : rows) {
    summary << r.cell << ',';
    std::snprintf(buf, sizeof buf, "%.17g", r.final_energy);
    summary << buf << ',' << r.iterations << ',';
    std::snprintf(buf, sizeof buf, "%.6f", r.seconds);
    summary << buf << ',' << r.status << '\n';
  }
  return rows;
}

}  // namespace knotflow
