#include "knotflow/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "knotflow/error.hpp"

namespace knotflow {

namespace {

[[noreturn]] void parse_fail(int line, const std::string& what) {
  fail(ErrorKind::ParseError, "parse error at line " + std::to_string(line) + ": " + what);
}

std::string strip(std::string s) {
  if (const auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  return parts;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_polygon(std::ostream& out, const Polygon& p) {
  out << "polyline " << p.size() << ' ' << p.dim() << '\n';
  for (int i = 0; i < p.size(); ++i) {
    for (int d = 0; d < p.dim(); ++d) {
      if (d) out << ' ';
      out << format_double(p.vertices()(d, i));
    }
    out << '\n';
  }
}

Polygon read_polygon(std::istream& in) {
  std::string raw;
  int line = 0;
  int n = -1, m = -1, row = 0;
  Mat pts;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = strip(raw);
    if (text.empty()) continue;
    std::istringstream fields(text);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (n < 0) {
      if (tok.size() != 3 || tok[0] != "polyline" || !parse_number(tok[1], n) ||
          !parse_number(tok[2], m) || n < 1 || m < 1)
        parse_fail(line, "expected header 'polyline <N> <m>'");
      pts.resize(m, n);
      continue;
    }
    if (row >= n) parse_fail(line, "more than " + std::to_string(n) + " vertex lines");
    if (static_cast<int>(tok.size()) != m)
      parse_fail(line, "expected " + std::to_string(m) + " coordinates, got " +
                           std::to_string(tok.size()));
    for (int d = 0; d < m; ++d) {
      double v = 0.0;
      if (!parse_number(tok[d], v)) parse_fail(line, "invalid number '" + tok[d] + "'");
      pts(d, row) = v;
    }
    ++row;
  }
  if (n < 0) parse_fail(line + 1, "missing 'polyline' header");
  if (row != n)
    parse_fail(line + 1, "expected " + std::to_string(n) + " vertex lines, got " +
                             std::to_string(row));
  return Polygon(std::move(pts));
}

void save_polygon(const std::string& path, const Polygon& p) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::InvalidArgument, "cannot write " + path);
  write_polygon(out, p);
}

Polygon load_polygon(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidArgument, "cannot read " + path);
  return read_polygon(in);
}

void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << kTraceHeader << '\n';
  for (const TraceRecord& r : trace)
    out << r.iter << ',' << format_double(r.time_s) << ',' << format_double(r.energy) << ','
        << format_double(r.grad_norm) << ',' << format_double(r.step_size) << ','
        << format_double(r.phi_inf) << ',' << r.backtracks << ',' << r.newton_iters << '\n';
}

void save_trace(const std::string& path, const std::vector<TraceRecord>& trace) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::InvalidArgument, "cannot write " + path);
  write_trace(out, trace);
}

Polygon make_input(const std::string& spec, std::uint64_t seed) {
  const std::vector<std::string> parts = split(spec, ':');
  auto bad = [&]() -> Polygon {
    fail(ErrorKind::InvalidArgument, "invalid generator spec '" + spec + "'");
  };
  auto integer = [&](std::size_t i) {
    int v = 0;
    if (i >= parts.size() || !parse_number(parts[i], v)) bad();
    return v;
  };
  auto real = [&](std::size_t i) {
    double v = 0.0;
    if (i >= parts.size() || !parse_number(parts[i], v)) bad();
    return v;
  };
  const std::string& kind = parts.empty() ? spec : parts[0];
  if (kind == "ngon" && parts.size() == 2) return regular_ngon(integer(1), 1.0);
  if (kind == "torus" && parts.size() == 4)
    return torus_knot(integer(1), integer(2), integer(3), 2.0, 1.0);
  if (kind == "coil" && parts.size() == 4)
    return coiled_unknot(integer(1), integer(2), real(3));
  if (kind == "perturbed" && parts.size() == 3)
    return perturbed_circle(integer(1), real(2), seed);
  if (parts.size() > 1 && (kind == "ngon" || kind == "torus" || kind == "coil" ||
                           kind == "perturbed"))
    return bad();
  return load_polygon(spec);
}

OptimizerConfig RunConfig::optimizer() const {
  OptimizerConfig cfg;
  cfg.method = method;
  cfg.metric.type = metric;
  cfg.mode = mode;
  cfg.alpha = alpha;
  cfg.max_iter = max_iter;
  cfg.grad_tol = grad_tol;
  cfg.quad = quad_k == 1 ? QuadratureRule::midpoint() : QuadratureRule::gauss_legendre(quad_k);
  if (time_budget > 0.0) cfg.time_budget = time_budget;
  if (target_energy > 0.0) cfg.target_energy = target_energy;
  return cfg;
}

void set_run_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  auto need = [&](bool ok) {
    if (!ok) fail(ErrorKind::ParseError, "invalid value '" + value + "' for key '" + key + "'");
  };
  if (key == "input") {
    cfg.input = value;
  } else if (key == "method") {
    cfg.method = parse_method(value);
  } else if (key == "metric") {
    cfg.metric = parse_metric(value);
  } else if (key == "mode") {
    cfg.mode = parse_mode(value);
  } else if (key == "alpha") {
    need(parse_number(value, cfg.alpha));
  } else if (key == "max_iter") {
    need(parse_number(value, cfg.max_iter) && cfg.max_iter >= 0);
  } else if (key == "grad_tol") {
    need(parse_number(value, cfg.grad_tol));
  } else if (key == "quad_k") {
    need(parse_number(value, cfg.quad_k) && cfg.quad_k >= 1);
  } else if (key == "seed") {
    need(parse_number(value, cfg.seed));
  } else if (key == "snapshot_every") {
    need(parse_number(value, cfg.snapshot_every) && cfg.snapshot_every >= 0);
  } else if (key == "out_dir") {
    cfg.out_dir = value;
  } else if (key == "time_budget") {
    need(parse_number(value, cfg.time_budget));
  } else if (key == "target_energy") {
    need(parse_number(value, cfg.target_energy));
  } else {
    fail(ErrorKind::ParseError, "unknown key '" + key + "'");
  }
}

RunConfig parse_run_config(std::istream& in) {
  RunConfig cfg;
  std::string raw;
  for (int line = 1; std::getline(in, raw); ++line) {
    const std::string text = strip(raw);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) parse_fail(line, "expected key=value");
    const std::string key = strip(text.substr(0, eq));
    const std::string value = strip(text.substr(eq + 1));
    try {
      set_run_config_value(cfg, key, value);
    } catch (const Error& e) {
      parse_fail(line, e.what());
    }
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidArgument, "cannot read " + path);
  return parse_run_config(in);
}

}  // namespace knotflow
