#include "pararelax/para.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pararelax/errors.hpp"
#include "pararelax/sampling.hpp"

namespace pararelax {

std::string_view to_string(Side side) { return side == Side::Under ? "under" : "over"; }

Side parse_side(std::string_view name) {
  if (name == "under" || name == "below") return Side::Under;
  if (name == "over" || name == "above") return Side::Over;
  throw DomainError("unknown side '" + std::string(name) + "'");
}

double ParaApproximation::envelope(double x) const {
  if (pieces.empty()) return side == Side::Under ? -std::numeric_limits<double>::infinity()
                                                 : std::numeric_limits<double>::infinity();
  double v = pieces.front().parabola(x);
  for (const auto& piece : pieces) {
    const double pv = piece.parabola(x);
    v = side == Side::Under ? std::max(v, pv) : std::min(v, pv);
  }
  return v;
}

namespace {

void check_denominator(double t_lo, double t_hi, double x) {
  const double guard = 1e-12 * (t_hi - t_lo);
  if (!(t_lo < t_hi) || std::abs(x - t_lo) < guard || std::abs(x - t_hi) < guard) {
    std::ostringstream os;
    os << "bound denominator vanishes at x = " << x << " for [" << t_lo << ", " << t_hi << "]";
    throw DegenerateDenominator(os.str());
  }
}

// B(x) evaluated in whichever form avoids cancellation near the closer end.
double stable_B(const UnivariateFunction& f, double t_lo, double t_hi, double x) {
  return x <= 0.5 * (t_lo + t_hi) ? bound_B(f, t_lo, t_hi, x) : bound_B_rewritten(f, t_lo, t_hi, x);
}

}  // namespace

double bound_B(const UnivariateFunction& f, double t_lo, double t_hi, double x) {
  check_denominator(t_lo, t_hi, x);
  const double f_lo = evaluate(f, t_lo);
  const double f_hi = evaluate(f, t_hi);
  return (evaluate(f, x) - f_lo) / ((x - t_lo) * (x - t_hi)) - (f_hi - f_lo) / ((t_hi - t_lo) * (x - t_hi));
}

double bound_B_rewritten(const UnivariateFunction& f, double t_lo, double t_hi, double x) {
  check_denominator(t_lo, t_hi, x);
  const double f_lo = evaluate(f, t_lo);
  const double f_hi = evaluate(f, t_hi);
  return (evaluate(f, x) - f_hi) / ((x - t_lo) * (x - t_hi)) - (f_hi - f_lo) / ((t_hi - t_lo) * (x - t_lo));
}

double bound_A(const UnivariateFunction& f, double t_lo, double t_hi, double eps, double x) {
  check_denominator(t_lo, t_hi, x);
  // A(x) = B(x) + eps / ((x - t_lo)(x - t_hi)) holds on both sides of the interval.
  return stable_B(f, t_lo, t_hi, x) + eps / ((x - t_lo) * (x - t_hi));
}

double initial_upper_a(const UnivariateFunction& f, double t_lo, double t_hi) {
  const double w = t_hi - t_lo;
  const double f_lo = evaluate(f, t_lo);
  const double f_hi = evaluate(f, t_hi);
  const double from_lo = (f_hi - f_lo - w * derivative(f, t_lo, 1)) / (w * w);
  const double from_hi = (f_lo - f_hi + w * derivative(f, t_hi, 1)) / (w * w);
  return std::min(from_lo, from_hi);
}

namespace {

void check_interval(double t_lo, double t_hi) {
  if (!(t_hi - t_lo >= 1e-12 * (1.0 + std::abs(t_hi)))) {
    std::ostringstream os;
    os << "interval [" << t_lo << ", " << t_hi << "] is too short to fix a parabola";
    throw DegenerateInterval(os.str());
  }
}

}  // namespace

Coefficients solve_bc(double a, double t_lo, double t_hi, const UnivariateFunction& f, double eps) {
  check_interval(t_lo, t_hi);
  // [t_lo 1; t_hi 1] (b, c)^T = d, determinant t_lo - t_hi < 0.
  const double d1 = evaluate(f, t_lo) - eps - a * t_lo * t_lo;
  const double d2 = evaluate(f, t_hi) - eps - a * t_hi * t_hi;
  const double det = t_lo - t_hi;
  return Coefficients{(d1 - d2) / det, (t_lo * d2 - t_hi * d1) / det};
}

Parabola parabola_from_a(double a, double t_lo, double t_hi, const UnivariateFunction& f, double eps) {
  check_interval(t_lo, t_hi);
  const double f_lo = evaluate(f, t_lo);
  const double slope = (evaluate(f, t_hi) - f_lo) / (t_hi - t_lo);
  return Parabola{a, slope - a * (t_hi + t_lo), f_lo - eps + t_lo * (a * t_hi - slope)};
}

InnerLoopResult inner_loop(const UnivariateFunction& f, const Interval& D, const Interval& D_loc, double eps,
                           int max_iter) {
  if (!(eps > 0.0)) throw DomainError("inner_loop: eps must be positive");
  if (!D.contains(D_loc) || !(D_loc.lo < D_loc.hi)) throw DomainError("inner_loop: invalid local interval");
  const double t_lo = D_loc.lo;
  const double t_hi = D_loc.hi;

  InnerLoopResult r;
  r.bounds.upper = initial_upper_a(f, t_lo, t_hi);
  for (int l = 0; l < max_iter; ++l) {
    const double a = r.bounds.upper;
    r.iterations = l + 1;
    r.a_history.push_back(a);
    r.parabola = parabola_from_a(a, t_lo, t_hi, f, eps);
    const InnerMaxima m = inner_maxima(r.parabola, f, D, D_loc, eps);
    if (m.v_max <= kFeasibilityTolerance) {
      r.status = InnerStatus::Feasible;
      return r;
    }
    if (m.outside.value > kFeasibilityTolerance) {
      r.bounds.upper = std::min(r.bounds.upper, bound_A(f, t_lo, t_hi, eps, m.outside.argmax));
    }
    if (m.inside_under.value > kFeasibilityTolerance) {
      r.bounds.lower = std::max(r.bounds.lower, bound_A(f, t_lo, t_hi, eps, m.inside_under.argmax));
    }
    if (m.inside_eps.value > kFeasibilityTolerance) {
      r.bounds.upper = std::min(r.bounds.upper, bound_B(f, t_lo, t_hi, m.inside_eps.argmax));
    }
    if (r.bounds.lower > r.bounds.upper || r.bounds.upper - r.bounds.lower < 1e-12 * (1.0 + std::abs(r.bounds.upper))) {
      r.status = InnerStatus::Infeasible;
      return r;
    }
  }
  r.status = InnerStatus::IterationLimit;
  return r;
}

ParaApproximation outer_loop_covering(const UnivariateFunction& f, const Interval& cover, const Interval& global,
                                      double eps, double lambda, OuterLoopStats* stats) {
  if (!(eps > 0.0)) throw DomainError("outer_loop: eps must be positive");
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("outer_loop: lambda must lie in (0, 1)");
  if (!(cover.lo < cover.hi) || !global.contains(cover)) throw DomainError("outer_loop: invalid domain");
  if (!f.valid_on(global)) throw DomainError("outer_loop: " + describe(f) + " undefined on domain");

  ParaApproximation approx;
  approx.function = f;
  approx.domain = cover;
  approx.epsilon = eps;
  approx.side = Side::Under;
  approx.lambda = lambda;

  const double min_width = 1e-9 * std::max(1.0, global.length());
  const double sliver = 1e-9 * cover.length();
  double t_prev = cover.lo;
  while (t_prev < cover.hi) {
    double t = cover.hi;
    InnerLoopResult r;
    while (true) {
      if (t - t_prev < min_width) {
        std::ostringstream os;
        os << "no parabola found on a piece starting at " << t_prev << " for " << describe(f);
        throw MinimumIntervalReached(os.str());
      }
      r = inner_loop(f, global, Interval{t_prev, t}, eps);
      if (stats) {
        ++stats->inner_calls;
        stats->inner_iterations += static_cast<std::size_t>(r.iterations);
        if (r.status == InnerStatus::IterationLimit) ++stats->iteration_limits;
      }
      if (r.feasible()) break;
      t = (1.0 - lambda) * t_prev + lambda * t;
    }
    approx.pieces.push_back(ParaPiece{r.parabola, Interval{t_prev, t}});
    t_prev = t;

    // A leftover sliver is absorbed by the last piece when that stays valid.
    if (t_prev < cover.hi && cover.hi - t_prev < sliver) {
      ParaPiece& last = approx.pieces.back();
      const Interval extended{last.piece_domain.lo, cover.hi};
      const InnerMaxima m = inner_maxima(last.parabola, f, global, extended, eps);
      if (m.v_max <= kFeasibilityTolerance) {
        last.piece_domain = extended;
        t_prev = cover.hi;
      }
    }
  }
  return approx;
}

ParaApproximation outer_loop(const UnivariateFunction& f, const Interval& D, double eps, double lambda,
                             OuterLoopStats* stats) {
  return outer_loop_covering(f, D, D, eps, lambda, stats);
}

ParaApproximation approximate(const UnivariateFunction& f, const Interval& D, double eps, Side side, double lambda,
                              OuterLoopStats* stats) {
  if (side == Side::Under) return outer_loop(f, D, eps, lambda, stats);
  ParaApproximation flipped = outer_loop(flip_for_overestimation(f), D, eps, lambda, stats);
  flipped.function = f;
  flipped.side = Side::Over;
  for (auto& piece : flipped.pieces) piece.parabola = piece.parabola.negated();
  return flipped;
}

ParaApproximation theorem2_construct(const UnivariateFunction& f, const Interval& D, double eps, double L) {
  if (!(D.length() > 0.0)) throw DegenerateDomain("theorem2_construct: domain has zero length");
  if (!(eps > 0.0) || !(L > 0.0)) throw DomainError("theorem2_construct: eps and L must be positive");
  const double count = std::ceil(D.length() * 3.0 * L / eps);
  if (count > 1e7) throw DomainError("theorem2_construct: partition too fine");
  const auto n = static_cast<std::size_t>(count);
  const double delta = D.length() / static_cast<double>(n);
  const double a = -4.0 * L / delta;

  ParaApproximation approx;
  approx.function = f;
  approx.domain = D;
  approx.epsilon = eps;
  approx.side = Side::Under;
  approx.lambda = 0.0;
  approx.pieces.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lo = D.lo + delta * static_cast<double>(k);
    const double hi = k + 1 == n ? D.hi : D.lo + delta * static_cast<double>(k + 1);
    const Coefficients bc = solve_bc(a, lo, hi, f, eps);
    approx.pieces.push_back(ParaPiece{Parabola{a, bc.b, bc.c}, Interval{lo, hi}});
  }
  return approx;
}

double ViolationReport::worst() const {
  double w = std::max(wrong_side, gap);
  for (double v : per_piece) w = std::max(w, v);
  return w;
}

ViolationReport verify(const ParaApproximation& approx, std::size_t samples, Execution exec) {
  ViolationReport report = exec == Execution::Parallel ? sampling::para_violations_parallel(approx, samples)
                                                       : sampling::para_violations_serial(approx, samples);
  report.pass = pieces_cover_domain(approx) && report.worst() <= kVerifySlack;
  return report;
}

bool pieces_cover_domain(const ParaApproximation& approx) {
  if (approx.pieces.empty()) return false;
  if (approx.pieces.front().piece_domain.lo != approx.domain.lo) return false;
  if (approx.pieces.back().piece_domain.hi != approx.domain.hi) return false;
  for (std::size_t k = 0; k < approx.pieces.size(); ++k) {
    const Interval& d = approx.pieces[k].piece_domain;
    if (!(d.lo < d.hi)) return false;
    if (k > 0 && approx.pieces[k - 1].piece_domain.hi != d.lo) return false;
  }
  return true;
}

}  // namespace pararelax
