#pragma once

// Piecewise-linear interpolation with greedy breakpoint placement, and the
// relaxation obtained by building it at eps/2 and shifting it down by eps/2.

#include <cstddef>
#include <vector>

#include "pararelax/functions.hpp"

namespace pararelax {

struct PwlApproximation {
  UnivariateFunction function;
  Interval domain;
  std::vector<double> breakpoints;  // t_0 = domain.lo < ... < t_K = domain.hi
  std::vector<double> values;       // f(t_k), unshifted
  double shift = 0.0;               // subtracted from every interpolated value
  double epsilon = 0.0;             // tolerance met by the unshifted interpolant

  /// Number of linear pieces K.
  std::size_t size() const { return breakpoints.empty() ? 0 : breakpoints.size() - 1; }
  /// Band width guaranteed for the shifted interpolant: f - w <= epsilon + shift.
  double relaxation_tolerance() const { return epsilon + shift; }
};

/// Shifted interpolant at x; throws OutOfDomain outside [t_0, t_K].
double interpolate(const PwlApproximation& pwl, double x);

/// Greedy left-to-right breakpoints. The domain is first cut at the
/// inflection points of f; inside each segment every t_k is the largest point
/// (to resolution 1e-9 |D|) keeping the chord error on [t_{k-1}, t_k] within eps.
PwlApproximation greedy_breakpoints(const UnivariateFunction& f, const Interval& D, double eps);

/// greedy_breakpoints at eps/2, shifted down by eps/2.
PwlApproximation relax_shift(const UnivariateFunction& f, const Interval& D, double eps);

/// max |chord - f| of the unshifted interpolant over the domain.
double max_error(const PwlApproximation& pwl);
double max_error(const UnivariateFunction& f, const PwlApproximation& pwl);

/// max |chord - f| on a single chord [lo, hi].
double chord_error(const UnivariateFunction& f, double lo, double hi);

struct PwlViolationReport {
  double above = 0.0;  // max of (w - f) / (1 + |f|): should be <= 0
  double below = 0.0;  // max of (f - w - tol) / (1 + |f|): should be <= 0
  std::size_t samples = 0;
  bool pass = false;
};

/// Dense-sampling check of w <= f <= w + relaxation_tolerance().
PwlViolationReport verify_relaxation(const PwlApproximation& pwl, std::size_t samples = 100'000);

}  // namespace pararelax
