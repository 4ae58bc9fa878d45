#pragma once

// Deterministic global maximization of smooth univariate objectives on
// closed intervals: a uniform grid locates every basin, then each grid-local
// maximum is polished by Newton's method on the derivative, safeguarded by
// bisection.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <vector>

#include "pararelax/errors.hpp"
#include "pararelax/functions.hpp"
#include "pararelax/parabola.hpp"

namespace pararelax {

struct MaxResult {
  double argmax = 0.0;
  double value = -std::numeric_limits<double>::infinity();
  int iterations = 0;

  bool empty() const { return value == -std::numeric_limits<double>::infinity(); }
};

/// max(129, ceil(64 |I|))
inline std::size_t default_grid(const Interval& I) {
  const double n = std::ceil(64.0 * I.length());
  return std::max<std::size_t>(129, n > 1e7 ? std::size_t{10'000'000} : static_cast<std::size_t>(n));
}

namespace detail {

template <class Objective>
Jet checked(Objective& objective, double x) {
  const Jet j = objective(x);
  if (!std::isfinite(j.value)) {
    std::ostringstream os;
    os << "objective is not finite at x = " << x;
    throw NonFiniteObjective(os.str());
  }
  return j;
}

// Newton on the derivative inside [left, right], starting from x0. Tracks the
// best point seen so the result never falls below the starting grid value.
template <class Objective>
MaxResult polish(Objective& objective, double left, double right, double x0, double v0, double tol) {
  MaxResult best{x0, v0, 0};
  double x = x0;
  Jet j = checked(objective, x);
  for (int it = 0; it < 100; ++it) {
    best.iterations = it + 1;
    if (j.slope > 0.0) {
      left = x;
    } else if (j.slope < 0.0) {
      right = x;
    } else {
      break;
    }
    double next = 0.5 * (left + right);
    if (j.curvature < 0.0 && std::isfinite(j.slope / j.curvature)) {
      const double newton = x - j.slope / j.curvature;
      if (newton > left && newton < right) next = newton;
    }
    const double step = std::abs(next - x);
    x = next;
    j = checked(objective, x);
    if (j.value > best.value) {
      best.value = j.value;
      best.argmax = x;
    }
    if (step < tol || right - left < tol) break;
  }
  return best;
}

}  // namespace detail

/// Global maximum of `objective` on I. `objective(x)` returns a Jet.
/// Every grid cell whose derivative changes sign from + to - brackets a local
/// maximum, which is polished; endpoints and grid values are candidates too.
/// When `open` is set, points within 1e-12 (relative to |I|) of either end
/// are excluded and the result is the best strictly interior candidate.
template <class Objective>
MaxResult global_max(Objective&& objective, const Interval& I, std::size_t grid_n = 0, bool open = false) {
  if (!(I.lo <= I.hi)) throw DomainError("global_max: empty interval");
  const double width = I.length();
  if (width == 0.0) {
    if (open) return MaxResult{I.lo, -std::numeric_limits<double>::infinity(), 0};
    return MaxResult{I.lo, detail::checked(objective, I.lo).value, 0};
  }
  const std::size_t n = std::max<std::size_t>(grid_n == 0 ? default_grid(I) : grid_n, 3);
  const double h = width / static_cast<double>(n - 1);
  const double tol = 1e-13 * (1.0 + width);
  const double edge = 1e-12 * std::max(1.0, width);

  std::vector<double> xs(n);
  std::vector<Jet> js(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = i + 1 == n ? I.hi : I.lo + h * static_cast<double>(i);
    js[i] = detail::checked(objective, xs[i]);
  }

  auto admissible = [&](double x) { return !open || (x - I.lo > edge && I.hi - x > edge); };

  MaxResult best;
  auto consider = [&](const MaxResult& r) {
    if (admissible(r.argmax) && r.value > best.value) best = r;
  };

  for (std::size_t i = 0; i < n; ++i) consider(MaxResult{xs[i], js[i].value, 0});
  int total_iterations = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double s0 = js[i].slope;
    const double s1 = js[i + 1].slope;
    const bool bracket = (s0 > 0.0 && s1 <= 0.0) || (s0 >= 0.0 && s1 < 0.0);
    if (!bracket) continue;
    const std::size_t start = js[i].value >= js[i + 1].value ? i : i + 1;
    const MaxResult r = detail::polish(objective, xs[i], xs[i + 1], xs[start], js[start].value, tol);
    total_iterations += r.iterations;
    consider(r);
  }
  best.iterations = total_iterations;
  return best;
}

/// The three maxima tested by the inner loop for a candidate parabola p:
/// p - f on D \ D_loc, p - f on int(D_loc), f - p - eps on int(D_loc).
struct InnerMaxima {
  MaxResult outside;
  MaxResult inside_under;
  MaxResult inside_eps;
  double v_max = -std::numeric_limits<double>::infinity();
};

InnerMaxima inner_maxima(const Parabola& p, const UnivariateFunction& f, const Interval& D,
                         const Interval& D_loc, double eps);

}  // namespace pararelax
