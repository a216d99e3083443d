#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "knotflow/metric.hpp"
#include "knotflow/optimize.hpp"

namespace knotflow {

struct BenchConfig {
  std::vector<std::string> inputs;  // make_input specs or curve files
  std::vector<Method> methods;
  std::vector<MetricType> metrics;
  double budget_s = 5.0;  // wall clock per cell
  int max_iter = 100000;
  double alpha = 1e3;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
};

struct BenchRow {
  std::string cell;
  double final_energy = 0.0;
  int iterations = 0;
  double seconds = 0.0;
  std::string status;
};

/// Runs every input x method x metric cell with the same wall-clock budget.
/// Writes <out_dir>/<cell>.csv per cell and <out_dir>/summary.csv; a failing
/// cell is recorded and the grid continues.
std::vector<BenchRow> run_bench(const BenchConfig& config);

std::string bench_cell_name(const std::string& input, Method method, MetricType metric);

}  // namespace knotflow
