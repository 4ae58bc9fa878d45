#include "pararelax/optim1d.hpp"

namespace pararelax {

InnerMaxima inner_maxima(const Parabola& p, const UnivariateFunction& f, const Interval& D,
                         const Interval& D_loc, double eps) {
  if (!D.contains(D_loc)) throw DomainError("inner_maxima: local interval not inside domain");

  auto under = [&](double x) {
    const Jet fj = jet(f, x);
    return Jet{p(x) - fj.value, p.slope(x) - fj.slope, p.curvature() - fj.curvature};
  };
  auto over = [&](double x) {
    const Jet fj = jet(f, x);
    return Jet{fj.value - p(x) - eps, fj.slope - p.slope(x), fj.curvature - p.curvature()};
  };

  InnerMaxima m;
  if (D.lo < D_loc.lo) m.outside = global_max(under, Interval{D.lo, D_loc.lo});
  if (D_loc.hi < D.hi) {
    const MaxResult right = global_max(under, Interval{D_loc.hi, D.hi});
    if (right.value > m.outside.value) m.outside = right;
  }
  m.inside_under = global_max(under, D_loc, 0, true);
  m.inside_eps = global_max(over, D_loc, 0, true);
  m.v_max = std::max({m.outside.value, m.inside_under.value, m.inside_eps.value});
  return m;
}

}  // namespace pararelax
