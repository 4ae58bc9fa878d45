#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pararelax {

/// Closed interval [lo, hi]. Degenerate (lo == hi) intervals are allowed;
/// callers that need a nonempty interior check `length() > 0`.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
  bool operator==(const Interval&) const = default;
};

/// Throws DomainError unless lo <= hi and both ends are finite.
Interval make_interval(double lo, double hi);

enum class FunctionKind { Sin, Cos, Exp, Ln };

std::string_view to_string(FunctionKind kind);
FunctionKind parse_function_kind(std::string_view name);

/// x -> post_scale * kind(pre_scale * x + pre_shift) + post_shift, negated
/// as a whole when `negated` is set.
struct UnivariateFunction {
  FunctionKind kind = FunctionKind::Sin;
  double pre_scale = 1.0;
  double pre_shift = 0.0;
  double post_scale = 1.0;
  double post_shift = 0.0;
  bool negated = false;

  bool operator==(const UnivariateFunction&) const = default;

  static UnivariateFunction of(FunctionKind kind) { return UnivariateFunction{kind}; }
  /// sin with post_scale 0: the identically-zero function.
  static UnivariateFunction zero() { return UnivariateFunction{FunctionKind::Sin, 1.0, 0.0, 0.0}; }

  /// Argument fed to the elementary kind.
  double inner(double x) const { return pre_scale * x + pre_shift; }
  /// True when x lies in the function's validity region (ln needs inner(x) > 0).
  bool valid_at(double x) const;
  /// True when every point of I is valid.
  bool valid_on(const Interval& I) const;
};

/// Value and first two derivatives at one point.
struct Jet {
  double value = 0.0;
  double slope = 0.0;
  double curvature = 0.0;
};

double evaluate(const UnivariateFunction& f, double x);

/// Analytic derivative of order 1, 2 or 3 (3 is used for maximizing |f'|).
double derivative(const UnivariateFunction& f, double x, int order);

/// Value, f' and f'' in one pass.
Jet jet(const UnivariateFunction& f, double x);

/// Upper bound on sup |f'| over I: global maximization of f' and -f',
/// inflated by 1e-9 relative.
double lipschitz_bound(const UnivariateFunction& f, const Interval& I);

/// Returns -f. Overestimators of f are obtained by underestimating -f and
/// negating the result.
UnivariateFunction flip_for_overestimation(const UnivariateFunction& f);

/// Strictly interior points of I where f'' changes sign, ascending.
std::vector<double> inflection_points(const UnivariateFunction& f, const Interval& I);

/// Short human-readable label such as "sin", "-exp(2*x+1)".
std::string describe(const UnivariateFunction& f);

}  // namespace pararelax
