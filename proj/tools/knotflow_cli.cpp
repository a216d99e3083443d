// knotflow command line: run, generate, bench, check.
//
// Exit codes: 0 ok, 1 numerical failure, 2 usage or parse error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "knotflow/bench.hpp"
#include "knotflow/collision.hpp"
#include "knotflow/constraint.hpp"
#include "knotflow/energy.hpp"
#include "knotflow/error.hpp"
#include "knotflow/io.hpp"
#include "knotflow/metric.hpp"
#include "knotflow/optimize.hpp"

namespace kf = knotflow;

namespace {

int exit_code_for(kf::ErrorKind kind) {
  switch (kind) {
    case kf::ErrorKind::ParseError:
    case kf::ErrorKind::InvalidArgument:
    case kf::ErrorKind::TooFewVertices:
    case kf::ErrorKind::DimensionMismatch: return 2;
    default: return 1;
  }
}

int report(const kf::Error& e) {
  std::cerr << "error kind=" << kf::to_string(e.kind()) << " message=\"" << e.what() << "\"\n";
  return exit_code_for(e.kind());
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides) {
  kf::RunConfig cfg = config_path.empty() ? kf::RunConfig{} : kf::load_run_config(config_path);
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      kf::fail(kf::ErrorKind::ParseError, "expected key=value, got '" + kv + "'");
    kf::set_run_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (cfg.input.empty()) kf::fail(kf::ErrorKind::InvalidArgument, "no input given");
  const kf::Polygon start = kf::make_input(cfg.input, cfg.seed);

  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  kf::OptimizerConfig opt = cfg.optimizer();
  if (cfg.snapshot_every > 0) {
    opt.on_iterate = [&](int iter, const kf::Polygon& p) {
      if (iter % cfg.snapshot_every != 0) return;
      char name[32];
      std::snprintf(name, sizeof name, "snap_%06d.poly", iter);
      kf::save_polygon((dir / name).string(), p);
    };
  }
  const kf::RunResult run = kf::optimize(start, opt);
  kf::save_trace((dir / "trace.csv").string(), run.trace);
  kf::save_polygon((dir / "final.poly").string(), run.final);
  const kf::TraceRecord& last = run.trace.back();
  std::printf("status=%s iterations=%d energy=%.12g grad_norm=%.3e phi_inf=%.3e\n",
              std::string(kf::to_string(run.status)).c_str(), last.iter, last.energy,
              last.grad_norm, last.phi_inf);
  if (!run.message.empty()) std::printf("message=\"%s\"\n", run.message.c_str());
  const bool failed = run.status == kf::Status::LineSearchFailure ||
                      run.status == kf::Status::NumericalFailure;
  return failed ? 1 : 0;
}

struct GenerateArgs {
  std::string kind;
  int n = 64;
  int dim = 3;
  double radius = 1.0;
  int p = 2, q = 3;
  double major = 2.0, minor = 1.0;
  int windings = 6;
  double aspect = 0.5;
  double amplitude = 0.05;
  std::uint64_t seed = 1;
  std::string output;
};

int cmd_generate(const GenerateArgs& a) {
  kf::Polygon poly = [&] {
    if (a.kind == "ngon") return kf::regular_ngon(a.n, a.radius, a.dim);
    if (a.kind == "torus-knot") return kf::torus_knot(a.p, a.q, a.n, a.major, a.minor);
    if (a.kind == "coil") return kf::coiled_unknot(a.n, a.windings, a.aspect);
    if (a.kind == "perturbed") return kf::perturbed_circle(a.n, a.amplitude, a.seed, 5, a.dim);
    kf::fail(kf::ErrorKind::InvalidArgument, "unknown curve kind '" + a.kind + "'");
  }();
  if (a.output.empty() || a.output == "-")
    kf::write_polygon(std::cout, poly);
  else
    kf::save_polygon(a.output, poly);
  return 0;
}

int cmd_bench(const std::vector<std::string>& inputs, const std::vector<std::string>& methods,
              const std::vector<std::string>& metrics, double budget, int max_iter,
              double alpha, std::uint64_t seed, const std::string& out_dir) {
  kf::BenchConfig cfg;
  cfg.inputs = inputs;
  for (const auto& m : methods) cfg.methods.push_back(kf::parse_method(m));
  for (const auto& m : metrics) cfg.metrics.push_back(kf::parse_metric(m));
  cfg.budget_s = budget;
  cfg.max_iter = max_iter;
  cfg.alpha = alpha;
  cfg.seed = seed;
  cfg.out_dir = out_dir;
  const auto rows = kf::run_bench(cfg);
  for (const auto& r : rows)
    std::printf("%-48s energy=%.10g iterations=%d seconds=%.2f status=%s\n", r.cell.c_str(),
                r.final_energy, r.iterations, r.seconds, r.status.c_str());
  return 0;
}

// Invariant suite on a single curve: embedding, energy finiteness and
// invariance, gradient consistency, metric symmetry, constraint rank.
int cmd_check(const std::string& input, std::uint64_t seed) {
  const kf::Polygon p = kf::make_input(input, seed);
  int failures = 0;
  auto line = [&](const char* name, bool ok, double value) {
    std::printf("%-34s %s  %.3e\n", name, ok ? "PASS" : "FAIL", value);
    failures += ok ? 0 : 1;
  };
  const double total = p.length();

  const double gap = kf::proximity(p).min_distance;
  line("embedded (min edge-pair distance)", gap > kf::kCollisionRelTol * total, gap / total);

  const double e = kf::energy_value(p);
  line("energy finite and >= 4", std::isfinite(e) && e >= 4.0 - 1e-9, e);

  kf::Vec shift = kf::Vec::Constant(p.dim(), 0.37 * total);
  kf::Mat rot = kf::Mat::Identity(p.dim(), p.dim());
  if (p.dim() >= 2) {
    rot(0, 0) = rot(1, 1) = std::cos(0.7);
    rot(0, 1) = -std::sin(0.7);
    rot(1, 0) = std::sin(0.7);
  }
  const double moved = kf::energy_value(p.transformed(2.5 * rot, shift));
  line("energy rigid/scale invariance", std::abs(moved - e) <= 1e-10 * e, std::abs(moved - e));

  const kf::Vec g = kf::d_energy(p);
  double drift = 0.0;
  for (int d = 0; d < p.dim(); ++d) {
    double s = 0.0;
    for (int i = 0; i < p.size(); ++i) s += g[i * p.dim() + d];
    drift = std::max(drift, std::abs(s));
  }
  line("gradient translation invariance", drift <= 1e-9 * g.norm() + 1e-300, drift);

  const kf::Vec dir = kf::Vec::LinSpaced(p.dofs(), -1.0, 1.0);
  double shortest = total;
  for (int i = 0; i < p.size(); ++i) shortest = std::min(shortest, p.edge_length(i));
  // Vertices move by at most h, a small fraction of the shortest edge.
  // Richardson extrapolation keeps h large enough to stay clear of roundoff.
  auto central = [&](double h) {
    return (kf::energy_value(p.displaced(dir, h)) - kf::energy_value(p.displaced(dir, -h))) /
           (2.0 * h);
  };
  const double h = 1e-3 * shortest;
  const double fd = (4.0 * central(0.5 * h) - central(h)) / 3.0;
  // E is scale invariant, so E/L is the natural gradient scale near critical points.
  const double scale = std::max(g.norm(), e / total) * dir.norm();
  const double rel = std::abs(fd - g.dot(dir)) / scale;
  line("gradient vs central difference", rel <= 1e-6, rel);

  const kf::Mat gram = kf::assemble_gram(p, kf::MetricKind{}).dense();
  const double asym = (gram - gram.transpose()).norm() / gram.norm();
  line("W32 Gram symmetry", asym <= 1e-13, asym);

  const kf::Mat jac = kf::d_phi(p);
  Eigen::ColPivHouseholderQR<kf::Mat> qr(jac.transpose());
  qr.setThreshold(1e-10);
  line("constraint Jacobian full row rank", qr.rank() == jac.rows(),
       static_cast<double>(jac.rows() - qr.rank()));

  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"knotflow: Sobolev-preconditioned minimisation of a discrete knot energy"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  auto* run = app.add_subcommand("run", "optimise a curve and write trace/snapshots");
  run->add_option("-c,--config", config_path, "key=value config file");
  run->add_option("settings", overrides,
                  "key=value overrides (input, method, metric, mode, alpha, max_iter, "
                  "grad_tol, quad_k, seed, snapshot_every, out_dir, time_budget, "
                  "target_energy)");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "write a generated curve file");
  generate->add_option("kind", gen.kind, "ngon | torus-knot | coil | perturbed")->required();
  generate->add_option("-N,--vertices", gen.n, "vertex count");
  generate->add_option("--dim", gen.dim, "ambient dimension (ngon, perturbed)");
  generate->add_option("--radius", gen.radius, "ngon radius");
  generate->add_option("-p", gen.p, "torus knot p");
  generate->add_option("-q", gen.q, "torus knot q");
  generate->add_option("--major", gen.major, "torus major radius");
  generate->add_option("--minor", gen.minor, "torus minor radius");
  generate->add_option("--windings", gen.windings, "coil windings");
  generate->add_option("--aspect", gen.aspect, "coil pitch / radius");
  generate->add_option("--amplitude", gen.amplitude, "perturbation amplitude");
  generate->add_option("--seed", gen.seed, "random seed");
  generate->add_option("-o,--output", gen.output, "output file (default stdout)");

  std::vector<std::string> inputs, methods{"ProjGD"}, metrics{"W32Geometric", "L2"};
  double budget = 5.0, alpha = 1e3;
  int bench_max_iter = 100000;
  std::uint64_t bench_seed = 1;
  std::string bench_out = "bench_out";
  auto* bench = app.add_subcommand("bench", "method x metric x input grid at equal wall clock");
  bench->add_option("-i,--inputs", inputs, "curve files or generator specs")->required();
  bench->add_option("-m,--methods", methods, "optimizer methods");
  bench->add_option("-g,--metrics", metrics, "metrics");
  bench->add_option("-b,--budget", budget, "seconds per cell");
  bench->add_option("--max-iter", bench_max_iter, "iteration cap per cell");
  bench->add_option("--alpha", alpha, "penalty weight");
  bench->add_option("--seed", bench_seed, "seed for generated inputs");
  bench->add_option("-o,--out-dir", bench_out, "output directory");

  std::string check_input;
  std::uint64_t check_seed = 1;
  auto* check = app.add_subcommand("check", "run the invariant suite on a curve");
  check->add_option("input", check_input, "curve file or generator spec")->required();
  check->add_option("--seed", check_seed, "seed for generated inputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(config_path, overrides);
    if (*generate) return cmd_generate(gen);
    if (*bench)
      return cmd_bench(inputs, methods, metrics, budget, bench_max_iter, alpha, bench_seed,
                       bench_out);
    if (*check) return cmd_check(check_input, check_seed);
  } catch (const kf::Error& e) {
    return report(e);
  } catch (const std::exception& e) {
    std::cerr << "error kind=Internal message=\"" << e.what() << "\"\n";
    return 1;
  }
  return 2;
}
