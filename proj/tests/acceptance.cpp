// One PASS/FAIL line per acceptance criterion. Exit status 1 when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "pararelax/count_table.hpp"
#include "pararelax/emit.hpp"
#include "pararelax/lut.hpp"
#include "pararelax/para.hpp"
#include "pararelax/pwl.hpp"
#include "pararelax/sampling.hpp"
#include "toys.hpp"

using namespace pararelax;
using std::numbers::e;
using std::numbers::pi;

namespace {

constexpr std::size_t kSamples = 100'000;

int failures = 0;
// approximations produced along the way, re-checked by the validity criterion
std::size_t validity_checked = 0;
std::size_t validity_failed = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

void record_validity(bool pass) {
  ++validity_checked;
  validity_failed += !pass;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Reference piece counts per domain label: above for eps = 1 .. 1e-3, then below.
using Reference = std::map<std::string, std::vector<std::size_t>>;

const Reference kSinCounts = {
    {"-pi/2:pi/2", {1, 3, 7, 22, 1, 3, 7, 22}},   {"pi/2:3pi/2", {1, 3, 7, 22, 1, 3, 7, 22}},
    {"-pi/2:3pi/2", {2, 5, 14, 44, 1, 5, 17, 51}}, {"0:pi", {1, 2, 5, 16, 1, 1, 5, 16}},
    {"pi:2pi", {1, 1, 5, 16, 1, 2, 5, 16}},        {"0:2pi", {2, 4, 14, 44, 2, 4, 14, 44}},
};

const Reference kExpCounts = {
    {"-5:-2", {1, 1, 2, 5, 1, 1, 2, 5}},           {"-2:2", {2, 5, 15, 47, 2, 4, 13, 39}},
    {"-5:2", {3, 7, 23, 70, 2, 6, 16, 51}},        {"2:5", {6, 16, 50, 158, 5, 14, 44, 137}},
    {"-2:5", {10, 31, 99, 313, 8, 23, 72, 225}},   {"-5:5", {13, 39, 122, 382, 9, 26, 79, 251}},
};

void table_criterion(const std::string& name, FunctionKind kind, const Reference& reference, double budget) {
  CountTableOptions opt;
  opt.samples = kSamples;
  opt.jobs = sampling::max_threads();
  const auto t0 = std::chrono::steady_clock::now();
  const auto cells = count_table(kind, opt, Execution::Parallel);
  const double secs = seconds_since(t0);

  std::size_t exact = 0, within = 0, verified = 0;
  std::string misses;
  for (const auto& c : cells) {
    const std::size_t eps_index = static_cast<std::size_t>(std::lround(-std::log10(c.epsilon)));
    const std::size_t expected = reference.at(c.label)[eps_index + (c.side == Side::Under ? 4 : 0)];
    const double diff = std::fabs(static_cast<double>(c.pieces) - static_cast<double>(expected));
    exact += diff == 0;
    within += diff <= std::max(1.0, 0.15 * static_cast<double>(expected));
    verified += c.verified;
    record_validity(c.verified);
    if (diff != 0) {
      char buf[128];
      std::snprintf(buf, sizeof buf, " [%s %s eps=%g: %zu vs %zu]", c.label.c_str(), side_label(c.side).c_str(),
                    c.epsilon, c.pieces, expected);
      misses += buf;
    }
  }
  const std::size_t n = cells.size();
  const bool pass = n == 48 && exact * 5 >= n * 4 && within == n && verified == n && secs < budget;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%zu cells, %zu exact, %zu within tolerance, %zu verified, %.1f s (budget %.0f s)", n,
                exact, within, verified, secs, budget);
  report(name, pass, buf + misses);
}

void sweep_criterion() {
  const auto sin = UnivariateFunction::of(FunctionKind::Sin);
  const auto ln = UnivariateFunction::of(FunctionKind::Ln);
  const double eps = 0.1;
  std::string detail;
  bool pass = true;
  auto add = [&](const std::string& what, std::size_t got, std::size_t lo, std::size_t hi, bool valid) {
    const bool ok = got >= lo && got <= hi && valid;
    pass &= ok;
    record_validity(valid);
    detail += " " + what + "=" + std::to_string(got) + (ok ? "" : "(!)");
  };
  const std::size_t para_sin_lo[] = {1, 4, 6}, para_sin_hi[] = {1, 6, 8};
  const std::size_t pwl_sin[] = {4, 8, 12}, pwl_ln[] = {4, 7, 10}, para_ln[] = {3, 7, 13};
  for (int l = 1; l <= 3; ++l) {
    const Interval D{0, l * pi};
    const auto p = outer_loop(sin, D, eps);
    add("para_sin" + std::to_string(l), p.size(), para_sin_lo[l - 1], para_sin_hi[l - 1], verify(p, kSamples).pass);
    const auto w = relax_shift(sin, D, eps);
    add("pwl_sin" + std::to_string(l), w.size(), pwl_sin[l - 1], pwl_sin[l - 1], verify_relaxation(w, kSamples).pass);
  }
  for (int l = -1; l <= 1; ++l) {
    const Interval D{std::exp(-4.0), std::exp(2.0 * l)};
    const auto p = outer_loop(ln, D, eps);
    add("para_ln" + std::to_string(l), p.size(), para_ln[l + 1], para_ln[l + 1], verify(p, kSamples).pass);
    const auto w = relax_shift(ln, D, eps);
    add("pwl_ln" + std::to_string(l), w.size(), pwl_ln[l + 1], pwl_ln[l + 1], verify_relaxation(w, kSamples).pass);
  }
  report("sweep-counts", pass, "eps=0.1;" + detail);
}

void construction_criterion() {
  struct Case {
    UnivariateFunction f;
    Interval D;
    double L;
  };
  const Case cases[] = {{UnivariateFunction::of(FunctionKind::Sin), {0, 2 * pi}, 1.0},
                        {UnivariateFunction::of(FunctionKind::Cos), {0, 2 * pi}, 1.0},
                        {UnivariateFunction::of(FunctionKind::Exp), {-2, 2}, e * e}};
  bool pass = true;
  std::string detail;
  for (const auto& c : cases) {
    for (double eps : {1.0, 0.1}) {
      const auto built = theorem2_construct(c.f, c.D, eps, c.L);
      const std::size_t expected = static_cast<std::size_t>(std::ceil(c.D.length() * 3 * c.L / eps));
      const std::size_t outer = outer_loop(c.f, c.D, eps).size();
      const bool valid = verify(built, kSamples).pass;
      const bool ok = valid && built.size() == expected && built.size() >= outer;
      pass &= ok;
      char buf[96];
      std::snprintf(buf, sizeof buf, " %s/%g: %zu (formula %zu, outer %zu)%s", describe(c.f).c_str(), eps,
                    built.size(), expected, outer, ok ? "" : "(!)");
      detail += buf;
    }
  }
  report("uniform-construction", pass, detail.substr(1));
}

void bound_criterion() {
  std::mt19937_64 rng(20240531);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const FunctionKind kinds[] = {FunctionKind::Sin, FunctionKind::Cos, FunctionKind::Exp, FunctionKind::Ln};
  double worst_a = 0, worst_c = 0;
  int missed_a = 0, missed_c = 0;
  for (int n = 0; n < 200; ++n) {
    const auto f = UnivariateFunction::of(kinds[n % 4]);
    const double lo = f.kind == FunctionKind::Ln ? 0.3 + 2 * u(rng) : -3 + 4 * u(rng);
    const double hi = lo + 0.3 + 2 * u(rng), eps = 0.01 + 0.5 * u(rng);
    auto parabola = [&](double a) {
      const auto bc = solve_bc(a, lo, hi, f, eps);
      return Parabola{a, bc.b, bc.c};
    };
    // (c) interior point: p(x) = f(x) - eps at a = B, violated beyond it
    const double xi = lo + (hi - lo) * (0.05 + 0.9 * u(rng));
    const double B = bound_B(f, lo, hi, xi);
    worst_c = std::max(worst_c, std::fabs(parabola(B)(xi) - (evaluate(f, xi) - eps)));
    missed_c += !(parabola(B + 1e-4 * (1 + std::fabs(B)))(xi) < evaluate(f, xi) - eps);
    // (a) exterior point: p(x) = f(x) at a = A, p > f beyond it
    const double xo = n % 2 ? hi + 0.05 + u(rng) : (f.kind == FunctionKind::Ln ? lo * (0.1 + 0.8 * u(rng)) : lo - 0.05 - u(rng));
    const double A = bound_A(f, lo, hi, eps, xo);
    worst_a = std::max(worst_a, std::fabs(parabola(A)(xo) - evaluate(f, xo)) / (1 + std::fabs(evaluate(f, xo))));
    missed_a += !(parabola(A + 1e-4 * (1 + std::fabs(A)))(xo) > evaluate(f, xo));
  }
  const bool pass = worst_a <= 1e-9 && worst_c <= 1e-9 && missed_a == 0 && missed_c == 0;
  char buf[192];
  std::snprintf(buf, sizeof buf,
                "200 draws per case; exterior residual %.2e, undetected %d; interior residual %.2e, undetected %d",
                worst_a, missed_a, worst_c, missed_c);
  report("bound-tightness", pass, buf);
}

struct ModelSizes {
  bool ok = true;
  std::size_t models = 0;
};

void sandwich_and_size_criteria() {
  std::size_t runs = 0, passed = 0;
  ModelSizes sizes;
  std::string failures_seen;
  for (const auto& toy : toys::sandwich_toys()) {
    const FactoredProblem fp = reformulate(toy.input);
    for (double eps : {1.0, 0.1, 0.01}) {
      const auto para = para_relaxations(fp, eps, 0.9, nullptr, kSamples);
      for (const auto& r : para) {
        if (r.under) record_validity(verify(*r.under, kSamples).pass);
        if (r.over) record_validity(verify(*r.over, kSamples).pass);
      }
      const auto pwl = pwl_relaxations(fp, eps, kSamples);
      for (const auto& r : pwl) record_validity(verify_relaxation(r, kSamples).pass);

      const RelaxedModel mp = emit_para(fp, para);
      const RelaxedModel mw = emit_pwl(fp, pwl);
      std::size_t para_rows = 0, pwl_vars = 0, pwl_bin = 0;
      for (const auto& r : para) para_rows += (r.under ? r.under->size() : 0) + (r.over ? r.over->size() : 0);
      for (const auto& r : pwl) {
        pwl_vars += 2 * r.size() - 1;
        pwl_bin += r.size() - 1;
      }
      const std::size_t base_int = omega_model(fp).integer_variables();
      sizes.ok &= mp.variables.size() == fp.variables.size() && mp.rows.size() == fp.omega.size() + para_rows;
      sizes.ok &= mw.variables.size() == fp.variables.size() + pwl_vars && mw.integer_variables() == base_int + pwl_bin;
      sizes.models += 2;

      for (const auto* m : {&mp, &mw}) {
        const CheckReport r = brute_force_check(*m, fp, 10'000);
        ++runs;
        passed += r.pass;
        if (!r.pass) {
          char buf[160];
          std::snprintf(buf, sizeof buf, " [%s %s eps=%g: original %.6g relaxed %.6g]", toy.label.c_str(),
                        m->technique.c_str(), eps, r.original, r.relaxed);
          failures_seen += buf;
        }
      }
    }
  }
  report("sandwich", passed == runs && runs == 30,
         std::to_string(passed) + "/" + std::to_string(runs) + " checks (5 toys x 2 techniques x 3 tolerances)" +
             failures_seen);
  report("size-formulas", sizes.ok, std::to_string(sizes.models) + " models match the variable/row/binary counts");
}

void lut_criterion() {
  bool pass = round_bounds(FunctionKind::Exp, {-132, 1}).lo == -200;
  pass &= std::fabs(round_bounds(FunctionKind::Exp, {-0.456, 1}).lo + 0.5) < 1e-15;
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t bad = 0;
  for (FunctionKind kind : {FunctionKind::Sin, FunctionKind::Cos, FunctionKind::Exp, FunctionKind::Ln}) {
    for (int n = 0; n < 10'000; ++n) {
      Interval raw;
      if (kind == FunctionKind::Ln) {
        raw.lo = std::pow(10.0, -3 + 5 * u(rng));
        raw.hi = raw.lo * (1 + 100 * u(rng));
      } else {
        const double scale = kind == FunctionKind::Exp ? std::pow(10.0, -2 + 4 * u(rng)) : 8.0;
        raw.lo = scale * (2 * u(rng) - 1);
        raw.hi = raw.lo + scale * u(rng) + 1e-6;
      }
      const Interval r = round_bounds(kind, raw);
      bad += !r.contains(raw) || !(round_bounds(kind, r) == r);
    }
  }
  pass &= bad == 0;
  report("lut-rounding", pass,
         "-132 -> " + std::to_string(round_bounds(FunctionKind::Exp, {-132, 1}).lo) + ", -0.456 -> " +
             std::to_string(round_bounds(FunctionKind::Exp, {-0.456, 1}).lo) + ", " + std::to_string(bad) +
             " containment/idempotence failures over 4 x 10^4 intervals");
}

}  // namespace

int main() {
  table_criterion("table-sin", FunctionKind::Sin, kSinCounts, 60.0);
  table_criterion("table-exp", FunctionKind::Exp, kExpCounts, 300.0);
  sweep_criterion();
  construction_criterion();
  bound_criterion();
  sandwich_and_size_criteria();
  lut_criterion();
  report("validity", validity_failed == 0,
         std::to_string(validity_checked - validity_failed) + "/" + std::to_string(validity_checked) +
             " approximations pass dense sampling at 10^5 points");
  return failures == 0 ? 0 : 1;
}
