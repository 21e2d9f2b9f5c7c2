#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>

#include "bergman/csv.hpp"
#include "bergman/errors.hpp"
#include "bergman/kernel.hpp"
#include "bergman/luqikeng.hpp"
#include "bergman/parallel.hpp"
#include "bergman/projection.hpp"
#include "bergman/quadrature.hpp"
#include "bergman/rng.hpp"
#include "bergman/transforms.hpp"

namespace bergman::cli {

using json = nlohmann::ordered_json;

const std::string& RunConfig::get(const std::string& key) const {
  for (const auto& [k, v] : values) {
    if (k == key) return v;
  }
  throw std::logic_error("RunConfig: unknown key " + key);
}

bool RunConfig::has(const std::string& key) const {
  return std::any_of(values.begin(), values.end(), [&](const auto& kv) { return kv.first == key; });
}

// ---------------------------------------------------------------------------
// field parsers

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, sep)) parts.push_back(trim(cur));
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

[[noreturn]] void bad_field(const std::string& field, const std::string& text, const std::string& what) {
  throw UsageError("invalid value for '" + field + "': '" + text + "' (" + what + ")");
}

bool parse_double_exact(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

} // namespace

double parse_real(const std::string& field, const std::string& text) {
  double x = 0.0;
  const std::string s = trim(text);
  if (!parse_double_exact(s, x) || !std::isfinite(x)) bad_field(field, text, "expected a finite number");
  return x;
}

long long parse_integer(const std::string& field, const std::string& text) {
  const std::string s = trim(text);
  long long x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) bad_field(field, text, "expected an integer");
  return x;
}

std::vector<double> parse_real_list(const std::string& field, const std::string& text) {
  if (trim(text).empty()) bad_field(field, text, "expected a comma-separated list");
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(parse_real(field, part));
  return out;
}

std::vector<int> parse_int_list(const std::string& field, const std::string& text) {
  if (trim(text).empty()) bad_field(field, text, "expected a comma-separated list");
  std::vector<int> out;
  for (const auto& part : split(text, ',')) out.push_back(static_cast<int>(parse_integer(field, part)));
  return out;
}

cplx parse_complex(const std::string& field, const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) bad_field(field, text, "expected a complex number");
  if (s.back() != 'i') return {parse_real(field, s), 0.0};

  const std::string body = s.substr(0, s.size() - 1);
  // split at the last sign that is not a leading sign or an exponent sign
  std::size_t cut = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      cut = i;
      break;
    }
  }
  auto imag_part = [&](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    double v = 0.0;
    if (!parse_double_exact(t, v) || !std::isfinite(v)) bad_field(field, text, "expected a complex number");
    return v;
  };
  if (cut == std::string::npos) return {0.0, imag_part(body)};
  double re = 0.0;
  if (!parse_double_exact(body.substr(0, cut), re) || !std::isfinite(re)) {
    bad_field(field, text, "expected a complex number");
  }
  return {re, imag_part(body.substr(cut))};
}

ComplexPoint parse_point(const std::string& field, const std::string& text) {
  if (trim(text).empty()) bad_field(field, text, "expected comma-separated coordinates");
  ComplexPoint p;
  for (const auto& part : split(text, ',')) p.push_back(parse_complex(field, part));
  return p;
}

std::vector<ComplexPoint> parse_points(const std::string& field, const std::string& text) {
  std::vector<ComplexPoint> pts;
  for (const auto& part : split(text, ';')) {
    if (!part.empty()) pts.push_back(parse_point(field, part));
  }
  if (pts.empty()) bad_field(field, text, "expected at least one point");
  return pts;
}

// ---------------------------------------------------------------------------
// config files

std::vector<std::pair<std::string, std::string>> load_config(const std::string& path, std::string& command) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  std::vector<std::pair<std::string, std::string>> out;

  if (trim(text).starts_with("{")) {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::exception& e) {
      throw UsageError("config file '" + path + "': " + e.what());
    }
    if (doc.contains("command") && doc["command"].is_string()) command = doc["command"].get<std::string>();
    const json& cfg = doc.contains("config") ? doc["config"] : doc;
    if (!cfg.is_object()) throw UsageError("config file '" + path + "': 'config' must be an object");
    for (const auto& [key, value] : cfg.items()) {
      if (key == "schema" || key == "command") continue;
      out.emplace_back(key, value.is_string() ? value.get<std::string>() : value.dump());
    }
    return out;
  }

  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config file '" + path + "' line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    while (key.starts_with("-")) key.erase(0, 1);
    const std::string value = trim(line.substr(eq + 1));
    if (key == "command") {
      command = value;
      continue;
    }
    out.emplace_back(key, value);
  }
  return out;
}

// ---------------------------------------------------------------------------
// subcommands

namespace {

struct OptionSpec {
  std::string key;
  std::string default_value;
  std::string help;
  bool flag = false;
};

struct Outcome {
  std::string csv;
  std::string status;
  bool passed = true;
  json results = json::object();
};

struct Command {
  std::string name;
  std::string help;
  std::vector<OptionSpec> options;
  std::function<Outcome(const RunConfig&)> body;
};

double real_of(const RunConfig& c, const std::string& key) { return parse_real(key, c.get(key)); }

long long int_of(const RunConfig& c, const std::string& key) { return parse_integer(key, c.get(key)); }

int positive_int(const RunConfig& c, const std::string& key) {
  const long long v = int_of(c, key);
  if (v < 1 || v > (1 << 30)) bad_field(key, c.get(key), "expected a positive integer");
  return static_cast<int>(v);
}

int nonneg_int(const RunConfig& c, const std::string& key) {
  const long long v = int_of(c, key);
  if (v < 0 || v > (1 << 30)) bad_field(key, c.get(key), "expected a non-negative integer");
  return static_cast<int>(v);
}

bool bool_of(const RunConfig& c, const std::string& key) {
  const std::string v = trim(c.get(key));
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0" || v.empty()) return false;
  bad_field(key, v, "expected true or false");
}

std::uint64_t seed_of(const RunConfig& c) {
  const long long v = int_of(c, "seed");
  if (v < 0) bad_field("seed", c.get("seed"), "expected a non-negative integer");
  return static_cast<std::uint64_t>(v);
}

EllipsoidSpec spec_of(const RunConfig& c) {
  std::vector<double> m = parse_real_list("m", c.get("m"));
  const std::string n_text = trim(c.get("n"));
  if (!n_text.empty()) {
    const long long n = parse_integer("n", n_text);
    if (n < 1) bad_field("n", n_text, "expected a positive integer");
    if (m.size() == 1) {
      m.assign(static_cast<std::size_t>(n), m.front());
    } else if (m.size() != static_cast<std::size_t>(n)) {
      bad_field("n", n_text, "does not match the length of m");
    }
  }
  for (double v : m) {
    if (!(v > 0.0)) bad_field("m", c.get("m"), "exponents must be positive");
  }
  return EllipsoidSpec(std::move(m));
}

std::vector<std::string> indexed(const std::string& prefix, std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < n; ++k) names.push_back(prefix + std::to_string(k + 1));
  return names;
}

template <typename... Groups>
std::vector<std::string> header(Groups&&... groups) {
  std::vector<std::string> h;
  (h.insert(h.end(), groups.begin(), groups.end()), ...);
  return h;
}

json complex_list(std::span<const cplx> v) {
  json a = json::array();
  for (const cplx& x : v) a.push_back(format_complex(x));
  return a;
}

json number(double x) { return std::isfinite(x) ? json(x) : json(format_double(x)); }

void point_fields(CsvWriter& w, std::span<const cplx> p) {
  for (const cplx& x : p) w.field(format_complex(x));
}

// Closed form where one exists (unless series are forced), else a series.
KernelEvaluator kernel_for(const EllipsoidSpec& spec, const std::string& mode, int cap) {
  if (mode != "auto" && mode != "series") bad_field("kernels", mode, "expected auto or series");
  if (mode == "auto") {
    if (auto closed = closed_form_evaluator(spec)) return *closed;
  }
  return series_evaluator(build_series(spec, cap));
}

// -- moments

Outcome run_moments(const RunConfig& c) {
  const EllipsoidSpec spec = spec_of(c);
  const int cap = nonneg_int(c, "cap");
  const auto alphas = enumerate_indices(spec, cap);
  std::ostringstream os;
  CsvWriter w(os, header(indexed("alpha_", spec.dim()), std::vector<std::string>{"log_moment", "moment"}));
  for (const auto& a : alphas) {
    for (int e : a.entries()) w.field(e);
    const double lm = log_moment(spec, a);
    w.field(lm).field(std::exp(lm));
    w.end_row();
  }
  Outcome out;
  out.csv = os.str();
  out.status = "ok";
  out.results["count"] = alphas.size();
  out.results["volume"] = volume(spec);
  return out;
}

// -- kernel-eval

Outcome run_kernel_eval(const RunConfig& c) {
  const EllipsoidSpec spec = spec_of(c);
  const int cap = nonneg_int(c, "cap");
  const double tol = real_of(c, "tol");
  const auto zs = parse_points("z", c.get("z"));
  const auto ws = parse_points("w", c.get("w"));
  if (zs.size() != ws.size()) bad_field("w", c.get("w"), "needs as many points as z");
  for (const auto& p : zs) require_dim(spec, p.size(), "z");
  for (const auto& p : ws) require_dim(spec, p.size(), "w");

  const KernelSeries series = build_series(spec, cap);
  const auto closed = closed_form_evaluator(spec);
  std::vector<std::string> cols{"re", "im", "tail_bound", "rounding_bound", "valid"};
  if (closed) cols.insert(cols.end(), {"closed_re", "closed_im", "rel_err"});
  std::ostringstream os;
  CsvWriter w(os, header(std::vector<std::string>{"index"}, indexed("z_", spec.dim()), indexed("w_", spec.dim()), cols));

  bool all_valid = true;
  double max_rel = 0.0;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const EvalResult r = eval_kernel(series, zs[i], ws[i]);
    all_valid = all_valid && r.valid;
    w.field(i);
    point_fields(w, zs[i]);
    point_fields(w, ws[i]);
    w.field(r.value.real()).field(r.value.imag()).field(r.tail_bound).field(r.rounding_bound);
    w.field(std::string(r.valid ? "true" : "false"));
    if (closed) {
      const cplx ref = (*closed)(zs[i], ws[i]).value;
      const double rel = std::abs(r.value - ref) / std::abs(ref);
      max_rel = std::max(max_rel, rel);
      w.field(ref.real()).field(ref.imag()).field(rel);
    }
    w.end_row();
  }
  Outcome out;
  out.csv = os.str();
  out.passed = all_valid && (!closed || max_rel <= tol);
  out.status = out.passed ? "ok" : "failed";
  out.results["points"] = zs.size();
  out.results["all_valid"] = all_valid;
  if (closed) out.results["max_rel_err_vs_closed_form"] = number(max_rel);
  return out;
}

// -- check-transform

HoloMap map_of(const RunConfig& c, const EllipsoidSpec& spec) {
  const std::string kind = c.get("map");
  const std::size_t n = spec.dim();
  SplitMix64 rng = SplitMix64::stream(seed_of(c), 0x6d6170);
  if (kind == "rotation") {
    std::vector<double> angles;
    if (trim(c.get("angles")).empty()) {
      for (std::size_t k = 0; k < n; ++k) angles.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
    } else {
      angles = parse_real_list("angles", c.get("angles"));
      if (angles.size() != n) bad_field("angles", c.get("angles"), "expected one angle per coordinate");
    }
    return HoloMap::rotation(spec, std::move(angles));
  }
  if (kind == "permutation") {
    std::vector<std::size_t> sigma;
    if (trim(c.get("sigma")).empty()) {
      for (std::size_t k = 0; k < n; ++k) sigma.push_back(n - 1 - k);
    } else {
      for (int s : parse_int_list("sigma", c.get("sigma"))) {
        if (s < 0) bad_field("sigma", c.get("sigma"), "expected a permutation of 0..n-1");
        sigma.push_back(static_cast<std::size_t>(s));
      }
    }
    return HoloMap::permutation(spec, std::move(sigma));
  }
  if (kind == "ball-automorphism") {
    if (!spec.is_ball()) bad_field("map", kind, "ball automorphisms need m = 1,...,1");
    ComplexPoint center;
    if (trim(c.get("center")).empty()) {
      for (std::size_t k = 0; k < n; ++k) center.push_back(std::polar(rng.uniform(0.0, 0.6 / std::sqrt(double(n))),
                                                                      rng.uniform(0.0, 2.0 * std::numbers::pi)));
    } else {
      center = parse_point("center", c.get("center"));
    }
    require_dim(spec, center.size(), "center");
    return HoloMap::ball_automorphism(std::move(center));
  }
  bad_field("map", kind, "expected rotation, permutation or ball-automorphism");
}

double max_defect_of(const RunConfig& c) {
  const double d = real_of(c, "max-defect");
  if (!(d > 0.0 && d < 1.0)) bad_field("max-defect", c.get("max-defect"), "expected a value in (0, 1)");
  return d;
}

Outcome run_check_transform(const RunConfig& c) {
  const EllipsoidSpec spec = spec_of(c);
  const HoloMap map = map_of(c, spec);
  const int cap = nonneg_int(c, "cap");
  const int pairs = positive_int(c, "pairs");
  const double tol = real_of(c, "tol");
  const std::string mode = c.get("kernels");

  const auto pts = default_sample_points(spec, 2 * static_cast<std::size_t>(pairs), max_defect_of(c), seed_of(c));
  std::vector<std::pair<ComplexPoint, ComplexPoint>> pr;
  for (int i = 0; i < pairs; ++i) pr.emplace_back(pts[2 * i], pts[2 * i + 1]);

  const TransformCheck check =
      check_biholomorphic_law(map, kernel_for(map.source(), mode, cap), kernel_for(map.target(), mode, cap), pr);

  const std::size_t n = spec.dim();
  std::ostringstream os;
  CsvWriter w(os, header(std::vector<std::string>{"pair"}, indexed("z_", n), indexed("zeta_", n),
                         std::vector<std::string>{"lhs", "rhs", "tail_bound", "residual"}));
  for (std::size_t i = 0; i < check.rows.size(); ++i) {
    const auto& r = check.rows[i];
    w.field(i);
    point_fields(w, r.z);
    point_fields(w, r.zeta);
    w.field(format_complex(r.lhs)).field(format_complex(r.rhs)).field(r.tail_bound).field(r.residual);
    w.end_row();
  }
  Outcome out;
  out.csv = os.str();
  out.passed = check.max_residual <= tol;
  out.status = out.passed ? "ok" : "failed";
  out.results["map"] = check.map;
  out.results["pairs"] = check.rows.size();
  out.results["max_residual"] = number(check.max_residual);
  return out;
}

// -- check-covering

Outcome run_check_covering(const RunConfig& c) {
  const EllipsoidSpec target = spec_of(c);
  const int j = positive_int(c, "j");
  const EllipsoidSpec source = target.scaled(j);
  const double tol = real_of(c, "tol");
  const std::string mode = c.get("kernels");
  const std::size_t n = target.dim();

  std::vector<ComplexPoint> zs, ws;
  if (trim(c.get("z")).empty() != trim(c.get("w")).empty()) bad_field("w", c.get("w"), "give both z and w or neither");
  if (!trim(c.get("z")).empty()) {
    zs = parse_points("z", c.get("z"));
    ws = parse_points("w", c.get("w"));
    if (zs.size() != ws.size()) bad_field("w", c.get("w"), "needs as many points as z");
  } else {
    const auto count = static_cast<std::size_t>(positive_int(c, "points"));
    const double d = max_defect_of(c);
    zs = default_sample_points(source, count, d, seed_of(c));
    ws = default_sample_points(target, count, d, seed_of(c) + 1);
    // keep W off the branch locus
    for (auto& w : ws) {
      for (auto& x : w) {
        if (std::abs(x) < 1e-3) x = std::abs(x) > 0.0 ? x * (1e-3 / std::abs(x)) : cplx(1e-3, 0.0);
      }
    }
  }

  const KernelEvaluator k_source = kernel_for(source, mode, positive_int(c, "source-cap"));
  const KernelEvaluator k_target = kernel_for(target, mode, positive_int(c, "target-cap"));

  std::ostringstream os;
  CsvWriter w(os, header(std::vector<std::string>{"point"}, indexed("z_", n), indexed("w_", n),
                         std::vector<std::string>{"lhs", "rhs", "tail_bound", "residual"}));
  double max_residual = 0.0;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const CoveringCheck r = check_bell_covering_law(j, target, zs[i], ws[i], k_source, k_target);
    max_residual = std::max(max_residual, r.residual);
    w.field(i);
    point_fields(w, r.z);
    point_fields(w, r.w);
    w.field(format_complex(r.lhs)).field(format_complex(r.rhs)).field(r.tail_bound).field(r.residual);
    w.end_row();
  }
  Outcome out;
  out.csv = os.str();
  out.passed = max_residual <= tol;
  out.status = out.passed ? "ok" : "failed";
  out.results["j"] = j;
  out.results["points"] = zs.size();
  out.results["max_residual"] = number(max_residual);
  return out;
}

// -- project

TestFunction test_function_of(const RunConfig& c, const EllipsoidSpec& spec) {
  const std::string g = c.get("g");
  auto alpha = [&] {
    std::vector<int> a = parse_int_list("alpha", c.get("alpha"));
    if (a.size() != spec.dim()) bad_field("alpha", c.get("alpha"), "expected one entry per coordinate");
    try {
      return MultiIndex(std::move(a));
    } catch (const std::invalid_argument& e) {
      bad_field("alpha", c.get("alpha"), e.what());
    }
  };
  if (g == "constant") return TestFunction::constant(parse_complex("value", c.get("value")));
  if (g == "monomial") return TestFunction::monomial(alpha());
  if (g == "anti-monomial") return TestFunction::anti_holomorphic_monomial(alpha());
  if (g == "radial-bump") return TestFunction::radial_bump(real_of(c, "radius"));
  if (g == "bump") {
    ComplexPoint center = parse_point("center", c.get("center"));
    require_dim(spec, center.size(), "center");
    return TestFunction::bump(std::move(center), real_of(c, "radius"));
  }
  bad_field("g", g, "expected constant, monomial, anti-monomial, radial-bump or bump");
}

Outcome run_project(const RunConfig& c) {
  const EllipsoidSpec spec = spec_of(c);
  const TestFunction g = test_function_of(c, spec);
  const int cap = nonneg_int(c, "cap");
  const QuadratureGrid grid(spec, positive_int(c, "radial"), positive_int(c, "angular"));
  ProjectOptions opts;
  opts.check_refinement = bool_of(c, "check-refinement");
  opts.refinement_tol = real_of(c, "refinement-tol");
  const ProjectedFunction pf = project(g, grid, cap, opts);
  const ContinuationEstimate est = continuation_radius_proxy(pf);

  std::ostringstream os;
  write_projection_csv(pf, os);
  Outcome out;
  out.csv = os.str();
  out.passed = !pf.unstable;
  out.status = pf.unstable ? "unstable" : "ok";
  out.results["function"] = g.describe();
  out.results["coefficients"] = pf.coefficients.size();
  out.results["refinement_checked"] = pf.refinement_checked;
  out.results["refinement_delta"] = number(pf.refinement_delta);
  out.results["continuation"] = {{"radius", number(est.radius)},
                                 {"finite_degree", est.finite_degree},
                                 {"low_confidence", est.low_confidence},
                                 {"nonzero", est.nonzero}};
  return out;
}

// -- zero-search / zero-transfer

SearchConfig search_config_of(const RunConfig& c) {
  SearchConfig cfg;
  cfg.cap = positive_int(c, "cap");
  cfg.starts = static_cast<std::size_t>(positive_int(c, "starts"));
  cfg.seed = seed_of(c);
  cfg.max_iters = static_cast<std::size_t>(positive_int(c, "max-iters"));
  cfg.delta = real_of(c, "delta");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) bad_field("delta", c.get("delta"), "expected a value in (0, 1)");
  cfg.zero_threshold_rel = real_of(c, "zero-threshold");
  if (!(cfg.zero_threshold_rel > 0.0)) bad_field("zero-threshold", c.get("zero-threshold"), "expected > 0");
  return cfg;
}

json report_json(const SearchReport& r) {
  return {{"status", to_string(r.status)},
          {"min_abs", number(r.min_abs)},
          {"argmin_t", complex_list(r.argmin_t)},
          {"margin", number(r.margin)},
          {"error_bound", number(r.error_bound)},
          {"zero_threshold", number(r.zero_threshold)},
          {"evaluations", r.evaluations},
          {"best_start", r.best_start},
          {"cap", r.cap}};
}

Outcome run_zero_search(const RunConfig& c) {
  const SearchConfig cfg = search_config_of(c);
  const std::string which = c.get("series");
  SearchReport report;
  if (which == "kernel") {
    report = zero_search(spec_of(c), cfg);
  } else if (which == "doctored-disc") {
    report = zero_search(doctored_disc_series(cfg.cap), cfg);
  } else {
    bad_field("series", which, "expected kernel or doctored-disc");
  }
  const std::size_t n = report.argmin_t.size();
  std::ostringstream os;
  CsvWriter w(os, header(std::vector<std::string>{"start", "min_abs", "evaluations"}, indexed("t_", n)));
  for (const auto& s : report.starts) {
    w.field(s.index).field(s.min_abs).field(s.evaluations);
    point_fields(w, s.argmin_t);
    w.end_row();
  }
  Outcome out;
  out.csv = os.str();
  out.status = to_string(report.status);
  out.passed = report.status != SearchStatus::Uncertified;
  out.results = report_json(report);
  return out;
}

Outcome run_zero_transfer(const RunConfig& c) {
  const SearchConfig cfg = search_config_of(c);
  const EllipsoidSpec spec = spec_of(c);
  const int j = positive_int(c, "j");
  const TransferReport t =
      zero_transfer_experiment(spec.exponents(), j, cfg, real_of(c, "covering-tol"));

  std::ostringstream os;
  CsvWriter w(os, {"level", "status", "min_abs", "margin", "error_bound", "evaluations"});
  auto row = [&](const char* level, const SearchReport& r) {
    w.field(std::string(level)).field(to_string(r.status)).field(r.min_abs).field(r.margin).field(r.error_bound);
    w.field(r.evaluations);
    w.end_row();
  };
  if (t.upstairs_search) row("upstairs", *t.upstairs_search);
  row("downstairs", t.downstairs_search);

  Outcome out;
  out.csv = os.str();
  out.passed = t.consistent;
  out.status = t.consistent ? "consistent" : "inconsistent";
  out.results["j"] = j;
  if (t.upstairs_search) out.results["upstairs"] = report_json(*t.upstairs_search);
  out.results["downstairs"] = report_json(t.downstairs_search);
  if (t.covering) {
    out.results["covering"] = {{"z", complex_list(t.covering->z)},
                               {"w", complex_list(t.covering->w)},
                               {"residual", number(t.covering->residual)}};
  }
  out.results["consistent"] = t.consistent;
  return out;
}

// -- ramadanov

Outcome run_ramadanov(const RunConfig& c) {
  const EllipsoidSpec spec = spec_of(c);
  const std::vector<int> js = parse_int_list("j", c.get("j"));
  const auto points = parse_points("points", c.get("points"));
  for (int j : js) {
    if (j < 1) bad_field("j", c.get("j"), "entries must be >= 1");
  }
  const RamadanovTable table = ramadanov_experiment(spec.exponents(), js, points);

  std::ostringstream os;
  CsvWriter w(os, header(std::vector<std::string>{"j", "point"}, indexed("p_", spec.dim()),
                         std::vector<std::string>{"value", "limit", "abs_diff", "rel_diff", "cap", "tail_bound"}));
  for (const auto& r : table.rows) {
    w.field(r.j).field(r.point);
    point_fields(w, r.p);
    w.field(r.value).field(r.limit).field(r.abs_diff).field(r.rel_diff).field(r.cap).field(r.tail_bound);
    w.end_row();
  }

  bool passed = std::all_of(table.eventually_decreasing.begin(), table.eventually_decreasing.end(),
                            [](bool b) { return b; });
  json final_rel = json::array();
  const std::size_t np = points.size();
  for (std::size_t p = 0; p < np; ++p) final_rel.push_back(number(table.rows[table.rows.size() - np + p].rel_diff));
  const std::string final_tol = trim(c.get("final-tol"));
  if (!final_tol.empty()) {
    const double tol = parse_real("final-tol", final_tol);
    for (std::size_t p = 0; p < np; ++p) passed = passed && table.rows[table.rows.size() - np + p].rel_diff <= tol;
  }

  Outcome out;
  out.csv = os.str();
  out.passed = passed;
  out.status = passed ? "ok" : "failed";
  out.results["j"] = table.j_list;
  out.results["rows"] = table.rows.size();
  json dec = json::array();
  for (bool b : table.eventually_decreasing) dec.push_back(b);
  out.results["eventually_decreasing"] = dec;
  out.results["final_rel_diff"] = final_rel;
  return out;
}

// ---------------------------------------------------------------------------

std::vector<OptionSpec> with_spec(std::string m_default, std::vector<OptionSpec> rest) {
  std::vector<OptionSpec> o{{"m", std::move(m_default), "exponents m_1,...,m_n"},
                            {"n", "", "dimension (repeats a single exponent)"}};
  o.insert(o.end(), rest.begin(), rest.end());
  o.push_back({"name", "", "output file stem (default: the subcommand)"});
  return o;
}

std::vector<OptionSpec> search_options(std::vector<OptionSpec> extra) {
  std::vector<OptionSpec> o{{"cap", "60", "series truncation degree"},
                            {"starts", "64", "multistart count"},
                            {"seed", "1", "RNG seed"},
                            {"max-iters", "3000", "objective evaluations per local search"},
                            {"delta", "0.25", "margin inside the moduli region"},
                            {"zero-threshold", "1e-10", "zero threshold relative to 1/volume"}};
  o.insert(o.end(), extra.begin(), extra.end());
  return o;
}

std::vector<Command> commands() {
  return {
      {"moments", "monomial moments ||z^alpha||^2 up to a degree cap",
       with_spec("1,1", {{"cap", "6", "maximum degree"}}), run_moments},
      {"kernel-eval", "evaluate the series kernel at point pairs",
       with_spec("1,1", {{"cap", "60", "series truncation degree"},
                         {"z", "0,0", "points z separated by ';'"},
                         {"w", "0,0", "points w separated by ';'"},
                         {"tol", "1e-8", "relative tolerance against a closed form"}}),
       run_kernel_eval},
      {"check-transform", "biholomorphic transformation law residuals",
       with_spec("1,2", {{"map", "rotation", "rotation, permutation or ball-automorphism"},
                         {"angles", "", "rotation angles (default: drawn from seed)"},
                         {"sigma", "", "permutation, 0-based (default: reversal)"},
                         {"center", "", "automorphism center (default: drawn from seed)"},
                         {"pairs", "50", "random point pairs"},
                         {"max-defect", "0.36", "sample points satisfy sum |z_k|^(2 m_k) <= this"},
                         {"cap", "60", "series truncation degree"},
                         {"kernels", "auto", "auto (closed forms where known) or series"},
                         {"seed", "1", "RNG seed"},
                         {"tol", "1e-10", "residual threshold"}}),
       run_check_transform},
      {"check-covering", "Bell covering law for z -> z^j onto the domain m",
       with_spec("1,1", {{"j", "2", "power"},
                         {"z", "", "source points (default: random)"},
                         {"w", "", "target points (default: random)"},
                         {"points", "20", "random point count"},
                         {"max-defect", "0.36", "sample points satisfy sum |z_k|^(2 m_k) <= this"},
                         {"source-cap", "60", "series cap on the covering domain"},
                         {"target-cap", "60", "series cap on the target domain"},
                         {"kernels", "auto", "auto (closed forms where known) or series"},
                         {"seed", "1", "RNG seed"},
                         {"tol", "1e-6", "residual threshold"}}),
       run_check_covering},
      {"project", "project a test function onto the Bergman space",
       with_spec("1,1", {{"g", "constant", "constant, monomial, anti-monomial, radial-bump or bump"},
                         {"value", "1", "constant value"},
                         {"alpha", "0,0", "monomial exponent"},
                         {"radius", "0.3", "bump radius"},
                         {"center", "0,0", "bump center"},
                         {"cap", "20", "polynomial degree cap"},
                         {"radial", "48", "radial nodes per coordinate"},
                         {"angular", "64", "angular nodes per coordinate"},
                         {"check-refinement", "false", "recompute on a doubled grid", true},
                         {"refinement-tol", "1e-8", "coefficient change flagged as unstable"}}),
       run_project},
      {"zero-search", "multistart search for kernel zeros",
       with_spec("1,1", search_options({{"series", "kernel", "kernel or doctored-disc"}})), run_zero_search},
      {"zero-transfer", "zero searches on both sides of the power covering",
       with_spec("1,1", search_options({{"j", "2", "power"}, {"covering-tol", "1e-6", "covering residual threshold"}})),
       run_zero_transfer},
      {"ramadanov", "K_j(p,p) on the domains j*m against the bidisc limit",
       with_spec("1,1", {{"j", "1,2,4,8", "increasing powers"},
                         {"points", "0.5+0i,0.5+0i", "test points separated by ';'"},
                         {"final-tol", "", "optional relative tolerance for the last j"}}),
       run_ramadanov},
  };
}

std::filesystem::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(out_dir_env); env != nullptr && *env != '\0') return env;
  return ".";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const std::vector<Command> cmds = commands();

  CLI::App app{"Bergman kernel experiments on generalized complex ellipsoids", "bergman-lab"};
  app.require_subcommand(1);

  struct Bound {
    const Command* cmd;
    CLI::App* sub;
    std::map<std::string, std::string> text;
    std::map<std::string, bool> flags;
    std::map<std::string, CLI::Option*> opts;
    std::string config;
    std::string out_dir;
    unsigned threads = 0;
    bool record_time = false;
  };
  std::vector<std::unique_ptr<Bound>> bound;
  for (const Command& cmd : cmds) {
    auto b = std::make_unique<Bound>();
    b->cmd = &cmd;
    b->sub = app.add_subcommand(cmd.name, cmd.help);
    for (const OptionSpec& o : cmd.options) {
      if (o.flag) {
        b->opts[o.key] = b->sub->add_flag("--" + o.key, b->flags[o.key], o.help);
      } else {
        b->opts[o.key] = b->sub->add_option("--" + o.key, b->text[o.key], o.help);
      }
    }
    b->sub->add_option("--config", b->config, "key = value file or a previous JSON summary");
    b->sub->add_option("--out-dir", b->out_dir, std::string("output directory (default: $") + out_dir_env + " or .)");
    b->sub->add_option("--threads", b->threads, "worker thread cap (0: hardware default)");
    b->sub->add_flag("--record-time", b->record_time, "add wall time to the JSON summary");
    bound.push_back(std::move(b));
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return exit_ok;
    }
    err << "bergman-lab: " << e.what() << "\n";
    return exit_usage;
  }

  const auto chosen = std::find_if(bound.begin(), bound.end(), [](const auto& b) { return b->sub->parsed(); });
  Bound& b = **chosen;
  const Command& cmd = *b.cmd;

  try {
    std::vector<std::pair<std::string, std::string>> file_values;
    if (!b.config.empty()) {
      std::string file_command;
      file_values = load_config(b.config, file_command);
      if (!file_command.empty() && file_command != cmd.name) {
        throw UsageError("config file is for '" + file_command + "', not '" + cmd.name + "'");
      }
      for (const auto& [key, value] : file_values) {
        const bool known = std::any_of(cmd.options.begin(), cmd.options.end(), [&](const auto& o) { return o.key == key; });
        if (!known) throw UsageError("unknown config field '" + key + "' for " + cmd.name);
      }
    }

    RunConfig config{cmd.name, {}};
    for (const OptionSpec& o : cmd.options) {
      std::string value = o.default_value;
      for (const auto& [key, v] : file_values) {
        if (key == o.key) value = v;
      }
      if (b.opts[o.key]->count() > 0) value = o.flag ? (b.flags[o.key] ? "true" : "false") : b.text[o.key];
      config.values.emplace_back(o.key, value);
    }
    std::string name = trim(config.get("name"));
    if (name.empty()) name = cmd.name;
    if (name.find('/') != std::string::npos) bad_field("name", name, "must not contain '/'");

    set_max_threads(b.threads);
    const auto t0 = std::chrono::steady_clock::now();
    const Outcome outcome = cmd.body(config);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json summary;
    summary["schema"] = schema_version;
    summary["command"] = cmd.name;
    json cfg = json::object();
    for (const auto& [k, v] : config.values) cfg[k] = v;
    summary["config"] = cfg;
    const EllipsoidSpec spec = spec_of(config);
    summary["spec"] = {{"n", spec.dim()}, {"m", spec.exponents()}};
    summary["status"] = outcome.status;
    summary["passed"] = outcome.passed;
    summary["results"] = outcome.results;
    if (b.record_time) summary["wall_time_s"] = wall;

    const std::filesystem::path dir = output_dir(b.out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / (name + ".csv"), outcome.csv);
    write_file(dir / (name + ".summary.json"), summary.dump(2) + "\n");

    out << cmd.name << ": " << outcome.status << " -> " << (dir / (name + ".csv")).string() << "\n";
    return outcome.passed ? exit_ok : exit_threshold;
  } catch (const UsageError& e) {
    err << "bergman-lab " << cmd.name << ": " << e.what() << "\n";
    return exit_usage;
  } catch (const std::invalid_argument& e) {
    err << "bergman-lab " << cmd.name << ": " << e.what() << "\n";
    return exit_usage;
  } catch (const ResourceError& e) {
    err << "bergman-lab " << cmd.name << ": " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    err << "bergman-lab " << cmd.name << ": error: " << e.what() << "\n";
    return exit_usage;
  }
}

} // namespace bergman::cli
