// Command-line front end: approximations, count tables, relaxed models,
// verification, look-up table management and plot data.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pararelax/count_table.hpp"
#include "pararelax/emit.hpp"
#include "pararelax/errors.hpp"
#include "pararelax/expr.hpp"
#include "pararelax/lut.hpp"
#include "pararelax/para.hpp"
#include "pararelax/pwl.hpp"
#include "pararelax/serialize.hpp"

using namespace pararelax;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 2, kComputeError = 3, kParseError = 4 };

// Thrown for malformed user input so it maps to exit code 4.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct JobSpec {
  std::string technique = "para";
  std::string fn = "sin";
  std::string domain;
  std::vector<double> eps = {};
  double lambda = 0.9;
  std::string side = "below";
  std::string out;
  std::string svg;
  std::string json_out;
  std::string input;
  std::string cache;
  std::size_t samples = 100'000;
  std::size_t grid = 10'000;
  int jobs = 1;
  bool check = false;
  bool serial = false;
  bool round_only = false;
};

UnivariateFunction parse_fn(const std::string& name) {
  if (name == "const0" || name == "zero") return UnivariateFunction::zero();
  try {
    return UnivariateFunction::of(parse_function_kind(name));
  } catch (const Error&) {
    throw InputError("unknown function '" + name + "' (expected sin, cos, exp, ln or const0)");
  }
}

Interval parse_domain(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw InputError("domain must look like lo:hi, got '" + text + "'");
  try {
    return make_interval(parse_constant(text.substr(0, colon)), parse_constant(text.substr(colon + 1)));
  } catch (const SyntaxError& e) {
    throw InputError("domain '" + text + "': " + e.what());
  } catch (const DomainError& e) {
    throw InputError("domain '" + text + "': " + e.what());
  }
}

Side parse_side_flag(const std::string& s) {
  try {
    return parse_side(s);
  } catch (const Error&) {
    throw InputError("side must be below or above, got '" + s + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double single_eps(const JobSpec& job) {
  if (job.eps.size() != 1) throw InputError("exactly one --eps value expected");
  if (!(job.eps[0] > 0.0)) throw InputError("--eps must be positive");
  return job.eps[0];
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw InputError("--lambda must lie in (0, 1)");
}

// ---------------------------------------------------------------------------

json approx_artifact(const ParaApproximation& a, const ViolationReport& rep) {
  return json{{"technique", "para"}, {"approximation", a}, {"verification", rep}};
}

json approx_artifact(const PwlApproximation& p, const PwlViolationReport& rep) {
  return json{{"technique", "pwl"}, {"approximation", p}, {"verification", rep}};
}

int cmd_approx(const JobSpec& job) {
  const UnivariateFunction f = parse_fn(job.fn);
  const Interval D = job.domain.empty() && job.fn == "const0" ? Interval{0.0, 1.0} : parse_domain(job.domain);
  const double eps = single_eps(job);
  check_lambda(job.lambda);

  json artifact;
  bool pass = false;
  std::size_t pieces = 0;
  if (job.technique == "para") {
    const Side side = parse_side_flag(job.side);
    ParaApproximation a = approximate(f, D, eps, side, job.lambda);
    ViolationReport rep = verify(a, job.samples);
    pass = rep.pass;
    pieces = a.size();
    artifact = approx_artifact(a, rep);
  } else if (job.technique == "pwl") {
    PwlApproximation p = relax_shift(f, D, eps);
    PwlViolationReport rep = verify_relaxation(p, job.samples);
    pass = rep.pass;
    pieces = p.size();
    artifact = approx_artifact(p, rep);
  } else {
    throw InputError("technique must be para or pwl");
  }

  std::cerr << job.technique << ' ' << describe(f) << " on [" << fmt(D.lo) << ", " << fmt(D.hi) << "] eps=" << eps
            << ": " << pieces << " pieces, verify " << (pass ? "PASS" : "FAIL") << "\n";
  if (!pass) {
    std::cerr << "refusing to write an artifact that fails verification\n" << artifact["verification"].dump(1) << "\n";
    return kVerifyFailed;
  }
  write_output(job.out, artifact.dump(1) + "\n");
  return kOk;
}

int cmd_count_table(const JobSpec& job) {
  CountTableOptions opt;
  if (!job.eps.empty()) opt.epsilons = job.eps;
  opt.lambda = job.lambda;
  opt.samples = job.samples;
  opt.jobs = job.jobs;
  check_lambda(job.lambda);
  for (double e : opt.epsilons) {
    if (!(e > 0.0)) throw InputError("--eps values must be positive");
  }

  std::vector<FunctionKind> kinds;
  if (job.fn == "all") kinds = {FunctionKind::Sin, FunctionKind::Exp};
  else kinds = {parse_fn(job.fn).kind};

  std::vector<CountCell> cells;
  for (FunctionKind k : kinds) {
    auto part = count_table(k, opt, job.serial ? Execution::Serial : Execution::Parallel);
    cells.insert(cells.end(), part.begin(), part.end());
  }
  write_output(job.out, to_csv(cells));

  std::size_t failed = 0;
  for (const auto& c : cells) failed += c.verified ? 0 : 1;
  std::cerr << cells.size() << " cells, " << failed << " failed verification\n";
  return failed ? kVerifyFailed : kOk;
}

int cmd_relax(const JobSpec& job) {
  if (job.input.empty()) throw InputError("--problem is required");
  FactoredProblem problem;
  try {
    problem = reformulate(parse_problem(read_file(job.input)));
  } catch (const Error& e) {
    throw InputError(e.what());
  }
  const double eps = single_eps(job);
  check_lambda(job.lambda);

  RelaxedModel model;
  std::vector<std::size_t> K;
  if (job.technique == "para") {
    LookupTable lut(job.cache);
    auto approx = para_relaxations(problem, eps, job.lambda, &lut, job.samples);
    model = emit_para(problem, approx);
    for (const auto& r : approx) K.push_back((r.under ? r.under->size() : 0) + (r.over ? r.over->size() : 0));
    std::cerr << "look-up table: " << lut.hits() << " hits, " << lut.misses() << " computed\n";
  } else if (job.technique == "pwl") {
    auto relax = pwl_relaxations(problem, eps, job.samples);
    model = emit_pwl(problem, relax);
    for (const auto& p : relax) K.push_back(p.size());
  } else {
    throw InputError("technique must be para or pwl");
  }

  const std::size_t n0 = problem.variables.size(), m0 = problem.omega.size();
  std::size_t expected_vars = 0, expected_rows = 0, expected_bin = 0;
  for (std::size_t k : K) {
    if (job.technique == "para") {
      expected_rows += k;
    } else {
      expected_vars += 2 * k - 1;
      expected_bin += k - 1;
    }
  }
  const std::size_t dvars = model.variables.size() - n0, drows = model.rows.size() - m0;
  std::cerr << "univariate constraints: " << problem.univariate.size() << " (" << problem.directions()
            << " directions)\n"
            << "variables: " << n0 << " -> " << model.variables.size() << " (+" << dvars << ", binaries +"
            << model.integer_variables() - std::count_if(problem.variables.begin(), problem.variables.end(),
                                                         [](const Variable& v) { return v.integer; })
            << ")\n"
            << "rows: " << m0 << " -> " << model.rows.size() << " (+" << drows << ")\n";
  if (job.technique == "para") {
    std::cerr << "formula: new variables 0, new rows sum K = " << expected_rows << " -> "
              << (dvars == 0 && drows == expected_rows ? "OK" : "MISMATCH") << "\n";
  } else {
    std::cerr << "formula: new variables sum(2K-1) = " << expected_vars << ", binaries sum(K-1) = " << expected_bin
              << " -> " << (dvars == expected_vars ? "OK" : "MISMATCH") << "\n";
  }

  write_output(job.out, write_model(model, ModelFormat::LpText));
  if (!job.json_out.empty()) write_output(job.json_out, write_model(model, ModelFormat::Json));

  if (job.check) {
    CheckReport rep = brute_force_check(model, problem, job.grid);
    std::cerr << "sandwich check (" << rep.points << " grid points"
              << (rep.eliminated.empty() ? "" : ", " + rep.eliminated + " solved exactly") << "): original "
              << fmt(rep.original) << ", relaxed " << fmt(rep.relaxed) << ", eps-relaxed " << fmt(rep.approximate)
              << ", eps " << rep.epsilon << " -> " << (rep.pass ? "PASS" : "FAIL") << "\n";
    if (!rep.pass) return kVerifyFailed;
  }
  return kOk;
}

// Loads an approximation artifact written by `approx` (or a bare approximation).
struct Loaded {
  std::string technique;
  ParaApproximation para;
  PwlApproximation pwl;
};

Loaded load_artifact(const std::string& path) {
  Loaded l;
  try {
    json j = json::parse(read_file(path));
    json a = j.contains("approximation") ? j["approximation"] : j;
    l.technique = j.value("technique", a.contains("pieces") ? "para" : "pwl");
    if (l.technique == "para") l.para = a.get<ParaApproximation>();
    else l.pwl = a.get<PwlApproximation>();
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  } catch (const Error& e) {
    throw InputError(path + ": " + e.what());
  }
  return l;
}

int cmd_verify(const JobSpec& job) {
  if (job.input.empty()) throw InputError("--in is required");
  Loaded l = load_artifact(job.input);
  json rep;
  bool pass = false;
  if (l.technique == "para") {
    ViolationReport r = verify(l.para, job.samples);
    pass = r.pass;
    rep = r;
  } else {
    PwlViolationReport r = verify_relaxation(l.pwl, job.samples);
    pass = r.pass;
    rep = r;
  }
  std::cout << rep.dump(1) << "\n";
  return pass ? kOk : kVerifyFailed;
}

int cmd_lut(const JobSpec& job) {
  const UnivariateFunction f = parse_fn(job.fn);
  if (!(f == UnivariateFunction::of(f.kind))) throw InputError("the look-up table serves sin, cos, exp and ln");
  const Interval raw = parse_domain(job.domain);
  Interval rounded;
  try {
    rounded = round_bounds(f.kind, raw);
  } catch (const DomainViolation& e) {
    throw InputError(e.what());
  }
  std::cerr << "rounded domain: [" << fmt(rounded.lo) << ", " << fmt(rounded.hi) << "]\n";
  if (job.round_only) {
    std::cout << json{{"raw", raw}, {"rounded", rounded}}.dump() << "\n";
    return kOk;
  }
  LookupTable table(job.cache);
  const Side side = parse_side_flag(job.side);
  check_lambda(job.lambda);
  ParaApproximation a = lookup_or_compute(table, f.kind, raw, single_eps(job), side, job.lambda, job.samples);
  std::cerr << "entries: " << table.size() << ", hits: " << table.hits() << ", computed: " << table.misses() << "\n";
  ViolationReport rep = verify(a, job.samples);
  write_output(job.out, approx_artifact(a, rep).dump(1) + "\n");
  return rep.pass ? kOk : kVerifyFailed;
}

// ---------------------------------------------------------------------------
// plot data

std::string svg_plot(const std::vector<double>& xs, const std::vector<std::vector<double>>& series,
                     const std::vector<std::string>& colors, const std::vector<double>& widths) {
  const double W = 640, H = 400, pad = 20;
  double ylo = INFINITY, yhi = -INFINITY;
  for (std::size_t s = 0; s < 2 && s < series.size(); ++s) {
    for (double v : series[s]) {
      ylo = std::min(ylo, v);
      yhi = std::max(yhi, v);
    }
  }
  const double span = yhi > ylo ? yhi - ylo : 1.0;
  ylo -= 0.1 * span;
  yhi += 0.1 * span;
  auto px = [&](double x) { return pad + (W - 2 * pad) * (x - xs.front()) / (xs.back() - xs.front()); };
  auto py = [&](double y) { return H - pad - (H - 2 * pad) * (y - ylo) / (yhi - ylo); };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W << "\" height=\"" << H << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  char buf[64];
  for (std::size_t s = series.size(); s-- > 0;) {
    os << "<polyline fill=\"none\" stroke=\"" << colors[s] << "\" stroke-width=\"" << widths[s] << "\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double y = std::clamp(series[s][i], ylo, yhi);
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(xs[i]), py(y));
      os << buf;
    }
    os << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

int cmd_plot_data(const JobSpec& job) {
  if (job.input.empty()) throw InputError("--in is required");
  if (job.samples < 1) throw InputError("--samples must be at least 1");
  Loaded l = load_artifact(job.input);
  const UnivariateFunction f = l.technique == "para" ? l.para.function : l.pwl.function;
  const Interval D = l.technique == "para" ? l.para.domain : l.pwl.domain;

  std::vector<std::string> header = {"x", "f"};
  std::vector<double> xs(job.samples + 1);
  std::vector<std::vector<double>> cols(2);
  if (l.technique == "para") {
    header.push_back("envelope");
    for (std::size_t k = 0; k < l.para.size(); ++k) header.push_back("p" + std::to_string(k + 1));
  } else {
    header.push_back("lower");
    header.push_back("upper");
  }
  cols.resize(header.size() - 1);
  for (std::size_t i = 0; i <= job.samples; ++i) {
    const double x = i == job.samples ? D.hi : D.lo + D.length() * static_cast<double>(i) / job.samples;
    xs[i] = x;
    cols[0].push_back(evaluate(f, x));
    if (l.technique == "para") {
      cols[1].push_back(l.para.envelope(x));
      for (std::size_t k = 0; k < l.para.size(); ++k) cols[2 + k].push_back(l.para.pieces[k].parabola(x));
    } else {
      const double w = interpolate(l.pwl, x);
      cols[1].push_back(w);
      cols[2].push_back(w + l.pwl.relaxation_tolerance());
    }
  }

  std::ostringstream os;
  for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
  os << "\n";
  for (std::size_t i = 0; i <= job.samples; ++i) {
    os << fmt(xs[i]);
    for (const auto& col : cols) os << ',' << fmt(col[i]);
    os << "\n";
  }
  write_output(job.out, os.str());

  if (!job.svg.empty()) {
    std::vector<std::string> colors = {"black", "crimson"};
    std::vector<double> widths = {2.0, 1.5};
    for (std::size_t c = 2; c < cols.size(); ++c) {
      colors.push_back(l.technique == "para" ? "lightsteelblue" : "crimson");
      widths.push_back(1.0);
    }
    write_output(job.svg, svg_plot(xs, cols, colors, widths));
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PARA and PWL relaxations of univariate nonlinear functions"};
  app.require_subcommand(1);
  JobSpec job;
  std::string command;
  // per-subcommand defaults differ, so each gets its own slot
  std::size_t relax_samples = 20'000;
  std::size_t plot_samples = 1000;

  auto common_fn = [&](CLI::App* sub) {
    sub->add_option("--fn", job.fn, "sin, cos, exp, ln or const0")->capture_default_str();
    sub->add_option("--domain", job.domain, "lo:hi, e.g. 0:pi, -pi/2:3pi/2, e^-4:e^2");
  };

  auto* approx = app.add_subcommand("approx", "compute and verify one approximation");
  approx->add_option("technique", job.technique, "para or pwl")->required();
  common_fn(approx);
  approx->add_option("--eps", job.eps, "tolerance")->required()->expected(1);
  approx->add_option("--lambda", job.lambda, "shrink factor of the outer loop")->capture_default_str();
  approx->add_option("--side", job.side, "below (underestimate) or above")->capture_default_str();
  approx->add_option("--samples", job.samples, "verification samples")->capture_default_str();
  approx->add_option("-o,--out", job.out, "JSON artifact path (default stdout)");

  auto* table = app.add_subcommand("count-table", "piece counts over the benchmark domains as CSV");
  table->add_option("--fn", job.fn, "sin, exp or all")->capture_default_str();
  table->add_option("--eps", job.eps, "tolerances (default 1 0.1 0.01 0.001)");
  table->add_option("--lambda", job.lambda)->capture_default_str();
  table->add_option("--samples", job.samples, "verification samples per cell")->capture_default_str();
  table->add_option("--jobs", job.jobs, "cells computed concurrently")->capture_default_str();
  table->add_flag("--serial", job.serial, "use the serial reference path");
  table->add_option("-o,--out", job.out, "CSV path (default stdout)");

  auto* relax = app.add_subcommand("relax", "reformulate a problem and emit its relaxed model");
  relax->add_option("--problem", job.input, "problem envelope (JSON)")->required();
  relax->add_option("--technique", job.technique, "para or pwl")->capture_default_str();
  relax->add_option("--eps", job.eps, "tolerance")->required()->expected(1);
  relax->add_option("--lambda", job.lambda)->capture_default_str();
  relax->add_option("--cache", job.cache, "look-up table file (JSON lines)");
  relax->add_option("--samples", relax_samples, "verification samples per approximation")->capture_default_str();
  relax->add_option("-o,--out", job.out, "lp-text model path (default stdout)");
  relax->add_option("--json", job.json_out, "JSON model path");
  relax->add_flag("--check", job.check, "run the brute-force sandwich check");
  relax->add_option("--grid", job.grid, "grid points for --check")->capture_default_str();

  auto* plot = app.add_subcommand("plot-data", "sample an approximation artifact to CSV (and SVG)");
  plot->add_option("--in", job.input, "artifact written by approx")->required();
  plot->add_option("--samples", plot_samples, "intervals; the CSV has samples+1 rows")->capture_default_str();
  plot->add_option("-o,--out", job.out, "CSV path (default stdout)");
  plot->add_option("--svg", job.svg, "SVG path");

  auto* verify_cmd = app.add_subcommand("verify", "re-verify an approximation artifact");
  verify_cmd->add_option("--in", job.input, "artifact written by approx")->required();
  verify_cmd->add_option("--samples", job.samples)->capture_default_str();

  auto* lut = app.add_subcommand("lut", "round bounds and serve approximations from the look-up table");
  common_fn(lut);
  lut->add_option("--eps", job.eps, "tolerance")->expected(1);
  lut->add_option("--lambda", job.lambda)->capture_default_str();
  lut->add_option("--side", job.side)->capture_default_str();
  lut->add_option("--cache", job.cache, "look-up table file (JSON lines)");
  lut->add_option("--samples", job.samples)->capture_default_str();
  lut->add_flag("--round-only", job.round_only, "print the rounded domain only");
  lut->add_option("-o,--out", job.out, "JSON artifact path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParseError;
  }

  if (*relax) job.samples = relax_samples;
  if (*plot) job.samples = plot_samples;

  try {
    if (*approx) return cmd_approx(job);
    if (*table) return cmd_count_table(job);
    if (*relax) return cmd_relax(job);
    if (*plot) return cmd_plot_data(job);
    if (*verify_cmd) return cmd_verify(job);
    if (*lut) return cmd_lut(job);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParseError;
  } catch (const SyntaxError& e) {
    std::cerr << "syntax error: " << e.what() << "\n";
    return kParseError;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kParseError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kComputeError;
  }
  return kOk;
}
