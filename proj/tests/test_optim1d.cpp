#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pararelax/errors.hpp"
#include "pararelax/optim1d.hpp"
#include "pararelax/para.hpp"

using namespace pararelax;
using std::numbers::pi;

namespace {

template <class F>
double dense_max(F f, const Interval& I, std::size_t n = 1'000'000) {
  double best = -INFINITY;
  for (std::size_t i = 0; i <= n; ++i) best = std::max(best, f(I.lo + I.length() * i / n));
  return best;
}

struct Cubic {
  double c3, c2, c1, s, w;
  double value(double x) const { return ((c3 * x + c2) * x + c1) * x - s * std::sin(w * x); }
  Jet operator()(double x) const {
    return {value(x), (3 * c3 * x + 2 * c2) * x + c1 - s * w * std::cos(w * x),
            6 * c3 * x + 2 * c2 + s * w * w * std::sin(w * x)};
  }
};

const UnivariateFunction kSin = UnivariateFunction::of(FunctionKind::Sin);

}  // namespace

TEST(GlobalMax, SinOnHalfPeriod) {
  auto r = global_max([](double x) { return Jet{std::sin(x), std::cos(x), -std::sin(x)}; }, {0, pi}, 129);
  EXPECT_NEAR(r.argmax, pi / 2, 1e-12);
  EXPECT_DOUBLE_EQ(r.value, 1.0);
}

TEST(GlobalMax, ConstantObjective) {
  auto r = global_max([](double) { return Jet{}; }, {0, 1}, 129);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_TRUE(Interval({0, 1}).contains(r.argmax));
}

TEST(GlobalMax, SinMinusLineMatchesDenseGrid) {
  auto g = [](double x) { return std::sin(x) - 2 * x / pi; };
  auto r = global_max([&](double x) { return Jet{g(x), std::cos(x) - 2 / pi, -std::sin(x)}; }, {0, pi}, 257);
  EXPECT_NEAR(r.argmax, std::acos(2 / pi), 1e-9);
  const double oracle = dense_max(g, {0, pi});
  EXPECT_NEAR(r.value, oracle, 1e-9);
  EXPECT_GE(r.value, oracle - 1e-15);
}

TEST(GlobalMax, NonFiniteObjectiveThrows) {
  EXPECT_THROW(global_max([](double x) { return Jet{std::log(x), 1 / x, -1 / (x * x)}; }, {0, 1}), NonFiniteObjective);
}

TEST(GlobalMax, DegenerateInterval) {
  auto r = global_max([](double x) { return Jet{x * x, 2 * x, 2}; }, {2, 2});
  EXPECT_EQ(r.value, 4.0);
  EXPECT_EQ(r.argmax, 2.0);
}

TEST(GlobalMax, OpenIntervalSkipsEndpoints) {
  // x on [0, 1] is maximal at the right end only.
  auto r = global_max([](double x) { return Jet{x, 1, 0}; }, {0, 1}, 0, true);
  EXPECT_LT(r.argmax, 1.0);
  EXPECT_GT(r.argmax, 0.0);
}

TEST(GlobalMax, RandomCubicMinusSineAgainstDenseGrid) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 0; n < 500; ++n) {
    const Cubic c{u(rng), 2 * u(rng), 3 * u(rng), 2 * u(rng), 1 + 4 * std::fabs(u(rng))};
    const double lo = 3 * u(rng);
    const Interval I{lo, lo + 0.5 + 3 * std::fabs(u(rng))};
    const auto r = global_max(c, I);
    ASSERT_TRUE(I.contains(r.argmax));
    ASSERT_NEAR(r.value, c.value(r.argmax), 1e-12 * (1 + std::fabs(r.value)));
    const double oracle = dense_max([&](double x) { return c.value(x); }, I);
    ASSERT_GE(r.value, oracle - 1e-9 * (1 + std::fabs(oracle))) << "case " << n;
  }
}

TEST(GlobalMax, DoublingTheGridNeverLosesValue) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 0; n < 100; ++n) {
    const Cubic c{u(rng), u(rng), u(rng), 3 * u(rng), 2 + 10 * std::fabs(u(rng))};
    const Interval I{-2, 2};
    const auto r1 = global_max(c, I, 129);
    const auto r2 = global_max(c, I, 258);
    EXPECT_GE(r2.value, r1.value - 1e-9);
  }
}

TEST(InnerMaxima, ConstantParabolaBelowSinIsInfeasible) {
  const auto m = inner_maxima(Parabola{0, 0, -0.1}, kSin, {0, pi}, {0, pi}, 0.1);
  EXPECT_TRUE(m.outside.empty());
  EXPECT_NEAR(m.inside_eps.value, 1.0, 1e-12);
  EXPECT_NEAR(m.inside_eps.argmax, pi / 2, 1e-9);
  EXPECT_NEAR(m.v_max, 1.0, 1e-12);
  EXPECT_GT(m.v_max, 0.0);
}

TEST(InnerMaxima, ZeroFunctionIsFeasible) {
  const double eps = 0.25;
  const auto m = inner_maxima(Parabola{0, 0, -eps}, UnivariateFunction::zero(), {0, 1}, {0, 1}, eps);
  EXPECT_TRUE(m.outside.empty());
  EXPECT_NEAR(m.inside_under.value, -eps, 1e-15);
  EXPECT_NEAR(m.inside_eps.value, 0.0, 1e-15);
  EXPECT_NEAR(m.v_max, 0.0, 1e-15);
}

TEST(InnerMaxima, ChordOfFirstHalfExceedsSinOnSecondHalf) {
  const double eps = 0.1;
  const auto bc = solve_bc(0.0, 0.0, pi, kSin, eps);
  const Parabola p{0.0, bc.b, bc.c};
  const auto m = inner_maxima(p, kSin, {0, 2 * pi}, {0, pi}, eps);
  const double oracle = dense_max([&](double x) { return p(x) - std::sin(x); }, {pi, 2 * pi});
  EXPECT_GT(m.outside.value, 0.0);
  EXPECT_NEAR(m.outside.value, oracle, 1e-9);
  EXPECT_NEAR(m.outside.value, 0.9, 1e-9);  // p = -0.1, sin reaches -1 at 3pi/2
}
