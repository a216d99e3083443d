#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "knotflow/curve.hpp"
#include "knotflow/metric.hpp"
#include "knotflow/optimize.hpp"

namespace knotflow {

// Curve files:
//
//   # optional comments
//   polyline <N> <m>
//   x y z        (N lines, m coordinates each; the loop closes implicitly)
//
// Coordinates are written with 17 significant digits so a round trip is
// bit-exact.
void write_polygon(std::ostream& out, const Polygon& p);
Polygon read_polygon(std::istream& in);
void save_polygon(const std::string& path, const Polygon& p);
Polygon load_polygon(const std::string& path);

inline constexpr const char* kTraceHeader =
    "iter,time_s,energy,grad_norm,step_size,phi_inf,backtracks,newton_iters";
void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace);
void save_trace(const std::string& path, const std::vector<TraceRecord>& trace);

/// Builds an input curve from a file path or a generator spec:
///   ngon:N  torus:p:q:N  coil:N:windings:aspect  perturbed:N:amplitude
/// (perturbed uses `seed`).
Polygon make_input(const std::string& spec, std::uint64_t seed);

struct RunConfig {
  std::string input;
  Method method = Method::ProjGD;
  MetricType metric = MetricType::W32Geometric;
  Mode mode = Mode::Auto;
  double alpha = 1e3;
  int max_iter = 1000;
  double grad_tol = 1e-4;
  int quad_k = 1;
  std::uint64_t seed = 1;
  int snapshot_every = 0;
  std::string out_dir = ".";
  double time_budget = 0.0;  // seconds, 0 = unlimited
  double target_energy = 0.0;  // 0 = none

  OptimizerConfig optimizer() const;
};

/// key=value lines; '#' starts a comment. Unknown keys and malformed values
/// throw ParseError naming the line.
RunConfig parse_run_config(std::istream& in);
RunConfig load_run_config(const std::string& path);
/// Applies a single key=value assignment (shared with the command line).
void set_run_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

}  // namespace knotflow
