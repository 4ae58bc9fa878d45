#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pararelax/emit.hpp"
#include "pararelax/errors.hpp"
#include "toys.hpp"

using namespace pararelax;
using std::numbers::pi;

namespace {

FactoredProblem sin_problem(double hi) { return reformulate(toys::minimize_y({{"x", 0, hi}, {"y", -2, 2}}, "sin(x)")); }

std::size_t para_pieces(const std::vector<ParaRelaxation>& a) {
  std::size_t n = 0;
  for (const auto& r : a) n += (r.under ? r.under->size() : 0) + (r.over ? r.over->size() : 0);
  return n;
}

// Random problems run through both pipelines.
RelaxedModel generated_model(int seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const char* exprs[] = {"sin(x)", "exp(x) - 2*z", "cos(3*x - 1)^2", "x*z - log(x + 3)", "(x + 4)^-1 + x^2"};
  ProblemInput in;
  in.variables = {{"x", -1 - u(rng), 1 + u(rng)}, {"z", 0, 2, seed % 3 == 0}, {"y", -50, 50}};
  in.objective = {{2, 1.0}, {1, std::round(100 * (u(rng) - 0.5)) / 10}};
  in.objective_constant = seed % 2 ? 0.25 : 0.0;
  const std::vector<std::string> names{"x", "z", "y"};
  const int count = 1 + seed % 3;
  for (int c = 0; c < count; ++c) {
    const std::string text = std::string(exprs[(seed + c) % 5]) + " - y";
    const Sense sense = c == 1 ? Sense::Eq : c == 2 ? Sense::Ge : Sense::Le;
    in.constraints.push_back({parse(text, names), sense, u(rng) - 0.5, ""});
  }
  in.constraints.push_back({parse("x + z", names), Sense::Ge, -3, "lin"});
  const FactoredProblem fp = reformulate(in);
  const double eps = seed % 4 == 0 ? 0.01 : 0.1;
  if (seed % 2) return emit_pwl(fp, pwl_relaxations(fp, eps, 2000));
  return emit_para(fp, para_relaxations(fp, eps, 0.9, nullptr, 2000));
}

}  // namespace

TEST(EmitPara, NoUnivariateConstraintsGivesOmega) {
  const FactoredProblem fp = reformulate(toys::minimize_y({{"x", 0, 1}, {"y", -1, 1}}, "2*x"));
  ASSERT_TRUE(fp.univariate.empty());
  const RelaxedModel m = emit_para(fp, {});
  const RelaxedModel omega = omega_model(fp);
  EXPECT_EQ(m.variables, omega.variables);
  EXPECT_EQ(m.rows, omega.rows);
  EXPECT_EQ(m.objective, omega.objective);
  EXPECT_EQ(emit_pwl(fp, {}).rows, omega.rows);
}

TEST(EmitPara, SinHalfPeriodAddsOneRow) {
  const FactoredProblem fp = sin_problem(pi);
  const auto approx = para_relaxations(fp, 1.0);
  ASSERT_TRUE(approx[0].under);
  EXPECT_FALSE(approx[0].over);
  const RelaxedModel m = emit_para(fp, approx);
  EXPECT_EQ(m.rows.size(), fp.omega.size() + 1);
  EXPECT_EQ(m.quadratic_rows(), 1u);
  EXPECT_EQ(m.variables.size(), fp.variables.size());
  EXPECT_EQ(m.rows.back().provenance, (Provenance{"para", "under", 0, 0}));
}

TEST(EmitPwl, SinHalfPeriodBlock) {
  const FactoredProblem fp = sin_problem(pi);
  const auto relax = pwl_relaxations(fp, 0.1);
  ASSERT_EQ(relax[0].size(), 4u);
  const RelaxedModel m = emit_pwl(fp, relax);
  ASSERT_EQ(m.blocks.size(), 1u);
  EXPECT_EQ(m.blocks[0].u.size(), 3u);
  EXPECT_EQ(m.blocks[0].delta.size(), 4u);
  EXPECT_EQ(m.integer_variables(), 3u);
  for (int v : m.blocks[0].delta) {
    EXPECT_FALSE(m.variables[v].integer);
    EXPECT_EQ(m.variables[v].lb, 0.0);
    EXPECT_EQ(m.variables[v].ub, 1.0);
  }
  EXPECT_EQ(m.quadratic_rows(), 0u);
}

TEST(EmitPwl, SinglePieceBlock) {
  const FactoredProblem fp = reformulate(toys::minimize_y({{"x", 0, 0.5}, {"y", -2, 2}}, "exp(x)"));
  const auto relax = pwl_relaxations(fp, 1.0);
  ASSERT_EQ(relax[0].size(), 1u);
  const RelaxedModel m = emit_pwl(fp, relax);
  EXPECT_EQ(m.blocks[0].u.size(), 0u);
  EXPECT_EQ(m.blocks[0].delta.size(), 1u);
  std::size_t eq = 0, ineq = 0;
  for (const auto& r : m.rows) {
    if (r.provenance.technique != "pwl") continue;
    (r.row.sense == Sense::Eq ? eq : ineq) += 1;
  }
  // x-link equality plus w <= y with w substituted
  EXPECT_EQ(eq, 1u);
  EXPECT_EQ(ineq, 1u);
}

TEST(EmitPwl, FillPatternReproducesInterpolant) {
  const FactoredProblem fp = sin_problem(1.5 * pi);
  const auto relax = pwl_relaxations(fp, 0.5);
  const PwlApproximation& p = relax[0];
  ASSERT_EQ(p.size(), 3u);
  const RelaxedModel m = emit_pwl(fp, relax);
  const PwlBlock& b = m.blocks[0];
  const int x = b.x_var, y = fp.univariate[0].y_index;
  for (std::size_t piece = 0; piece < 3; ++piece) {
    for (double theta : {0.0, 0.3, 0.75, 1.0}) {
      std::vector<double> v(m.variables.size(), 0.0);
      for (std::size_t k = 0; k < 3; ++k) v[b.delta[k]] = k < piece ? 1.0 : k == piece ? theta : 0.0;
      for (std::size_t k = 0; k < 2; ++k) v[b.u[k]] = k < piece ? 1.0 : 0.0;
      const double xv = p.breakpoints[piece] + theta * (p.breakpoints[piece + 1] - p.breakpoints[piece]);
      v[x] = xv;
      const double w = interpolate(p, xv);
      v[y] = w;
      for (const auto& r : m.rows) {
        if (r.provenance.technique == "pwl") EXPECT_TRUE(r.row.satisfied(v, 1e-12)) << r.row.name;
      }
      std::vector<double> completed(v);
      completed[y] = 0.0;
      complete_blocks(m, completed);
      for (int k : b.delta) EXPECT_NEAR(completed[k], v[k], 1e-12);
      // at a breakpoint both neighbouring pieces are valid choices for u
      if (theta > 0.0 && theta < 1.0)
        for (int k : b.u) EXPECT_EQ(completed[k], v[k]);
      v[y] = w - 1e-6;  // y below the interpolant violates w <= y
      bool violated = false;
      for (const auto& r : m.rows)
        if (r.provenance.role == "w_under") violated |= !r.row.satisfied(v, 1e-12);
      EXPECT_TRUE(violated);
    }
  }
}

TEST(Emit, SizeFormulas) {
  const FactoredProblem fp = reformulate(toys::sandwich_toys()[4].input);
  ASSERT_EQ(fp.univariate.size(), 1u);
  for (double eps : {1.0, 0.1, 0.01}) {
    const auto para = para_relaxations(fp, eps);
    const RelaxedModel mp = emit_para(fp, para);
    EXPECT_EQ(mp.variables.size(), fp.variables.size());
    EXPECT_EQ(mp.rows.size(), fp.omega.size() + para_pieces(para));

    const auto pwl = pwl_relaxations(fp, eps);
    const RelaxedModel mw = emit_pwl(fp, pwl);
    std::size_t added = 0, binaries = 0;
    for (const auto& r : pwl) {
      added += 2 * r.size() - 1;
      binaries += r.size() - 1;
    }
    EXPECT_EQ(mw.variables.size(), fp.variables.size() + added);
    EXPECT_EQ(mw.integer_variables(), binaries);
  }
}

TEST(Emit, EqualityConstraintsUseBothSides) {
  ProblemInput in = toys::minimize_y({{"x", -1, 2}, {"y", -5, 5}}, "exp(x)");
  in.constraints[0].sense = Sense::Eq;
  const FactoredProblem fp = reformulate(in);
  const auto para = para_relaxations(fp, 0.1);
  ASSERT_TRUE(para[0].under && para[0].over);
  const RelaxedModel mp = emit_para(fp, para);
  EXPECT_EQ(mp.rows.size(), fp.omega.size() + para[0].under->size() + para[0].over->size());
  const RelaxedModel mw = emit_pwl(fp, pwl_relaxations(fp, 0.1));
  EXPECT_EQ(mw.blocks.size(), 1u);  // one block serves both directions
  bool under = false, over = false;
  for (const auto& r : mw.rows) {
    under |= r.provenance.role == "w_under";
    over |= r.provenance.role == "w_over";
  }
  EXPECT_TRUE(under && over);
}

TEST(Emit, DomainMismatch) {
  const FactoredProblem fp = sin_problem(pi);
  ParaRelaxation wrong_domain{approximate(UnivariateFunction::of(FunctionKind::Sin), {0, 2}, 0.1, Side::Under), {}};
  EXPECT_THROW(emit_para(fp, {wrong_domain}), DomainMismatch);
  ParaRelaxation wrong_function{approximate(UnivariateFunction::of(FunctionKind::Cos), {0, pi}, 0.1, Side::Under), {}};
  EXPECT_THROW(emit_para(fp, {wrong_function}), DomainMismatch);
  EXPECT_THROW(emit_para(fp, {ParaRelaxation{}}), DomainMismatch);
  EXPECT_THROW(emit_pwl(fp, {relax_shift(UnivariateFunction::of(FunctionKind::Sin), {0.5, pi}, 0.1)}), DomainMismatch);
}

TEST(Emit, WriteReadRoundTrip) {
  for (int seed = 0; seed < 50; ++seed) {
    const RelaxedModel m = generated_model(seed);
    for (ModelFormat format : {ModelFormat::LpText, ModelFormat::Json}) {
      const std::string text = write_model(m, format);
      const RelaxedModel back = read_model(text, format);
      ASSERT_EQ(back, m) << "seed " << seed << (format == ModelFormat::Json ? " json" : " lp");
      EXPECT_EQ(write_model(back, format), text);
    }
  }
}

TEST(Emit, OutputIsDeterministic) {
  const std::string a = write_model(generated_model(7), ModelFormat::LpText);
  const std::string b = write_model(generated_model(7), ModelFormat::LpText);
  EXPECT_EQ(a, b);
  EXPECT_EQ(write_model(generated_model(8), ModelFormat::Json), write_model(generated_model(8), ModelFormat::Json));
}

TEST(Emit, EmptyModelIsHeaderOnly) {
  const std::string text = write_model(RelaxedModel{}, ModelFormat::LpText);
  EXPECT_NE(text.find("OBJECTIVE"), std::string::npos);
  EXPECT_NE(text.find("END"), std::string::npos);
  EXPECT_EQ(read_model(text, ModelFormat::LpText), RelaxedModel{});
}

TEST(Emit, MalformedTextIsRejected) {
  EXPECT_THROW(read_model("OBJECTIVE\n maximize: + 1 x\nEND\n", ModelFormat::LpText), FormatError);
  EXPECT_THROW(read_model("{", ModelFormat::Json), FormatError);
}

TEST(BruteForce, SinExample) {
  const FactoredProblem fp = sin_problem(2 * pi);
  const RelaxedModel m = emit_para(fp, para_relaxations(fp, 0.1));
  const CheckReport r = brute_force_check(m, fp, 10'000);
  EXPECT_NEAR(r.original, -1.0, 1e-6);
  EXPECT_GE(r.relaxed, -1.1 - 1e-9);
  EXPECT_LE(r.relaxed, -1.0 + 1e-9);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.eliminated, "y");
}

TEST(BruteForce, LinearModelHasEqualOptima) {
  ProblemInput in;
  in.variables = {{"a", 0, 3}, {"b", -1, 1}};
  in.objective = {{0, 1}, {1, 2}};
  in.constraints.push_back({parse("a + b", {"a", "b"}), Sense::Ge, 1, "c"});
  const FactoredProblem fp = reformulate(in);
  const CheckReport r = brute_force_check(omega_model(fp), fp, 10'000);
  EXPECT_NEAR(r.original, r.relaxed, 1e-12);
  EXPECT_NEAR(r.original, r.approximate, 1e-12);
  EXPECT_TRUE(r.pass);
}

TEST(BruteForce, BothTechniquesSandwichToys) {
  for (const auto& toy : toys::sandwich_toys()) {
    const FactoredProblem fp = reformulate(toy.input);
    for (double eps : {1.0, 0.1}) {
      const auto rp = brute_force_check(emit_para(fp, para_relaxations(fp, eps)), fp, 2'500);
      const auto rw = brute_force_check(emit_pwl(fp, pwl_relaxations(fp, eps)), fp, 2'500);
      EXPECT_TRUE(rp.pass) << toy.label << " para " << eps;
      EXPECT_TRUE(rw.pass) << toy.label << " pwl " << eps;
    }
  }
}

TEST(BruteForce, DimensionTooLarge) {
  ProblemInput in;
  in.variables = {{"a", 0, 1}, {"b", 0, 1}, {"c", 0, 1}, {"d", 0, 1}};
  in.objective = {{0, 1}};
  in.constraints.push_back({parse("sin(a) + b*c + d", {"a", "b", "c", "d"}), Sense::Le, 2, "c"});
  const FactoredProblem fp = reformulate(in);
  EXPECT_THROW(brute_force_check(omega_model(fp), fp), DimensionTooLarge);
  ProblemInput many;
  many.variables = {{"k", 0, 20, true}, {"y", 0, 1}};
  many.objective = {{1, 1}};
  many.constraints.push_back({parse("k - y", {"k", "y"}), Sense::Le, 0, "c"});
  const FactoredProblem fk = reformulate(many);
  EXPECT_THROW(brute_force_check(omega_model(fk), fk), DimensionTooLarge);
}
