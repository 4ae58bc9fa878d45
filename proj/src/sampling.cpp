#include "pararelax/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pararelax::sampling {

double sample_point(const Interval& D, std::size_t i, std::size_t samples) {
  if (i >= samples) return D.hi;
  return D.lo + D.length() * (static_cast<double>(i) / static_cast<double>(samples));
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

std::vector<double> para_points(const ParaApproximation& approx, std::size_t samples) {
  std::vector<double> xs;
  xs.reserve(samples + 1 + 2 * approx.pieces.size());
  for (std::size_t i = 0; i <= samples; ++i) xs.push_back(sample_point(approx.domain, i, samples));
  for (const auto& piece : approx.pieces) {
    xs.push_back(piece.piece_domain.lo);
    xs.push_back(piece.piece_domain.hi);
  }
  return xs;
}

struct ParaAccumulator {
  double wrong_side = -HUGE_VAL;
  double gap = -HUGE_VAL;
  std::vector<double> per_piece;

  explicit ParaAccumulator(std::size_t k) : per_piece(k, -HUGE_VAL) {}

  void add(const ParaApproximation& approx, double x) {
    const double fx = evaluate(approx.function, x);
    const double norm = 1.0 + std::abs(fx);
    const bool under = approx.side == Side::Under;
    double env = under ? -HUGE_VAL : HUGE_VAL;
    for (std::size_t k = 0; k < approx.pieces.size(); ++k) {
      const double pv = approx.pieces[k].parabola(x);
      env = under ? std::max(env, pv) : std::min(env, pv);
      per_piece[k] = std::max(per_piece[k], (under ? pv - fx : fx - pv) / norm);
    }
    wrong_side = std::max(wrong_side, (under ? env - fx : fx - env) / norm);
    gap = std::max(gap, (under ? fx - approx.epsilon - env : env - fx - approx.epsilon) / norm);
  }

  void merge(const ParaAccumulator& other) {
    wrong_side = std::max(wrong_side, other.wrong_side);
    gap = std::max(gap, other.gap);
    for (std::size_t k = 0; k < per_piece.size(); ++k) per_piece[k] = std::max(per_piece[k], other.per_piece[k]);
  }

  ViolationReport report(std::size_t samples) const {
    ViolationReport r;
    r.wrong_side = wrong_side;
    r.gap = gap;
    r.per_piece = per_piece;
    r.samples = samples;
    return r;
  }
};

}  // namespace

ViolationReport para_violations_serial(const ParaApproximation& approx, std::size_t samples) {
  const std::vector<double> xs = para_points(approx, samples);
  ParaAccumulator acc(approx.pieces.size());
  for (double x : xs) acc.add(approx, x);
  return acc.report(samples);
}

ViolationReport para_violations_parallel(const ParaApproximation& approx, std::size_t samples) {
  const std::vector<double> xs = para_points(approx, samples);
  const auto n = static_cast<std::ptrdiff_t>(xs.size());
  ParaAccumulator total(approx.pieces.size());
#pragma omp parallel
  {
    ParaAccumulator local(approx.pieces.size());
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < n; ++i) local.add(approx, xs[static_cast<std::size_t>(i)]);
#pragma omp critical(pararelax_para_merge)
    total.merge(local);
  }
  return total.report(samples);
}

namespace {

struct PwlAccumulator {
  double above = -HUGE_VAL;
  double below = -HUGE_VAL;

  void add(const PwlApproximation& pwl, double x) {
    const double fx = evaluate(pwl.function, x);
    const double w = interpolate(pwl, x);
    const double norm = 1.0 + std::abs(fx);
    above = std::max(above, (w - fx) / norm);
    below = std::max(below, (fx - w - pwl.relaxation_tolerance()) / norm);
  }
};

std::vector<double> pwl_points(const PwlApproximation& pwl, std::size_t samples) {
  std::vector<double> xs;
  xs.reserve(samples + 1 + pwl.breakpoints.size());
  for (std::size_t i = 0; i <= samples; ++i) xs.push_back(sample_point(pwl.domain, i, samples));
  xs.insert(xs.end(), pwl.breakpoints.begin(), pwl.breakpoints.end());
  return xs;
}

PwlViolationReport finish(const PwlAccumulator& acc, std::size_t samples) {
  PwlViolationReport r;
  r.above = acc.above;
  r.below = acc.below;
  r.samples = samples;
  return r;
}

}  // namespace

PwlViolationReport pwl_violations_serial(const PwlApproximation& pwl, std::size_t samples) {
  PwlAccumulator acc;
  for (double x : pwl_points(pwl, samples)) acc.add(pwl, x);
  return finish(acc, samples);
}

PwlViolationReport pwl_violations_parallel(const PwlApproximation& pwl, std::size_t samples) {
  const std::vector<double> xs = pwl_points(pwl, samples);
  const auto n = static_cast<std::ptrdiff_t>(xs.size());
  double above = -HUGE_VAL;
  double below = -HUGE_VAL;
#pragma omp parallel for schedule(static) reduction(max : above, below)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    PwlAccumulator acc;
    acc.add(pwl, xs[static_cast<std::size_t>(i)]);
    above = std::max(above, acc.above);
    below = std::max(below, acc.below);
  }
  PwlAccumulator acc;
  acc.above = above;
  acc.below = below;
  return finish(acc, samples);
}

}  // namespace pararelax::sampling
