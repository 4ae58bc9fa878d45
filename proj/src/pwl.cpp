#include "pararelax/pwl.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pararelax/errors.hpp"
#include "pararelax/optim1d.hpp"
#include "pararelax/sampling.hpp"

namespace pararelax {

double interpolate(const PwlApproximation& pwl, double x) {
  if (pwl.breakpoints.size() < 2 || !(x >= pwl.breakpoints.front() && x <= pwl.breakpoints.back())) {
    std::ostringstream os;
    os << "x = " << x << " outside the interpolation domain";
    throw OutOfDomain(os.str());
  }
  const auto& t = pwl.breakpoints;
  auto it = std::upper_bound(t.begin(), t.end(), x);
  std::size_t k = it == t.end() ? t.size() - 1 : static_cast<std::size_t>(it - t.begin());
  k = std::max<std::size_t>(k, 1);
  const double t0 = t[k - 1];
  const double t1 = t[k];
  const double f0 = pwl.values[k - 1];
  const double f1 = pwl.values[k];
  if (x == t0) return f0 - pwl.shift;
  if (x == t1) return f1 - pwl.shift;
  const double w = t1 - t0;
  return f0 * ((t1 - x) / w) + f1 * ((x - t0) / w) - pwl.shift;
}

double chord_error(const UnivariateFunction& f, double lo, double hi) {
  if (!(lo < hi)) return 0.0;
  const double f_lo = evaluate(f, lo);
  const double slope = (evaluate(f, hi) - f_lo) / (hi - lo);
  auto above = [&](double x) {
    const Jet j = jet(f, x);
    return Jet{f_lo + slope * (x - lo) - j.value, slope - j.slope, -j.curvature};
  };
  auto below = [&](double x) {
    const Jet j = jet(f, x);
    return Jet{j.value - f_lo - slope * (x - lo), j.slope - slope, j.curvature};
  };
  const Interval I{lo, hi};
  return std::max({global_max(above, I).value, global_max(below, I).value, 0.0});
}

PwlApproximation greedy_breakpoints(const UnivariateFunction& f, const Interval& D, double eps) {
  if (!(eps > 0.0)) throw DomainError("greedy_breakpoints: eps must be positive");
  if (!(D.lo < D.hi)) throw DomainError("greedy_breakpoints: empty domain");
  if (!f.valid_on(D)) throw DomainError("greedy_breakpoints: " + describe(f) + " undefined on domain");

  PwlApproximation pwl;
  pwl.function = f;
  pwl.domain = D;
  pwl.epsilon = eps;
  pwl.breakpoints.push_back(D.lo);

  // Breakpoints are forced at inflection points so that every chord lies on
  // a segment of constant curvature sign; the greedy search runs per segment.
  std::vector<double> segment_ends = inflection_points(f, D);
  segment_ends.push_back(D.hi);

  const double resolution = 1e-9 * D.length();
  double start = D.lo;
  for (double end : segment_ends) {
    while (start < end) {
      if (chord_error(f, start, end) <= eps) {
        pwl.breakpoints.push_back(end);
        start = end;
        break;
      }
      double feasible = start;
      double infeasible = end;
      while (infeasible - feasible > resolution) {
        const double mid = 0.5 * (feasible + infeasible);
        if (chord_error(f, start, mid) <= eps) {
          feasible = mid;
        } else {
          infeasible = mid;
        }
      }
      if (feasible <= start) feasible = std::min(end, start + resolution);
      pwl.breakpoints.push_back(feasible);
      start = feasible;
    }
  }
  pwl.values.reserve(pwl.breakpoints.size());
  for (double t : pwl.breakpoints) pwl.values.push_back(evaluate(f, t));
  return pwl;
}

PwlApproximation relax_shift(const UnivariateFunction& f, const Interval& D, double eps) {
  PwlApproximation pwl = greedy_breakpoints(f, D, 0.5 * eps);
  pwl.shift = 0.5 * eps;
  return pwl;
}

double max_error(const UnivariateFunction& f, const PwlApproximation& pwl) {
  double worst = 0.0;
  for (std::size_t k = 1; k < pwl.breakpoints.size(); ++k) {
    worst = std::max(worst, chord_error(f, pwl.breakpoints[k - 1], pwl.breakpoints[k]));
  }
  return worst;
}

double max_error(const PwlApproximation& pwl) { return max_error(pwl.function, pwl); }

PwlViolationReport verify_relaxation(const PwlApproximation& pwl, std::size_t samples) {
  PwlViolationReport r = sampling::pwl_violations_parallel(pwl, samples);
  r.pass = r.above <= 1e-8 && r.below <= 1e-8;
  return r;
}

}  // namespace pararelax
