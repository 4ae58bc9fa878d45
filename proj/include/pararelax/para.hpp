#pragma once

// Global one-sided parabolic (PARA) approximations: every parabola
// underestimates f on the whole domain and their pointwise maximum stays
// within eps of f. Pieces are produced left to right by an outer loop that
// shrinks the candidate interval and an inner loop that searches the
// quadratic coefficient a using closed-form bounds.

#include <cstddef>
#include <limits>
#include <string_view>
#include <vector>

#include "pararelax/functions.hpp"
#include "pararelax/optim1d.hpp"
#include "pararelax/parabola.hpp"

namespace pararelax {

enum class Side { Under, Over };

std::string_view to_string(Side side);
Side parse_side(std::string_view name);

struct ParaPiece {
  Parabola parabola;
  Interval piece_domain;
};

struct ParaApproximation {
  UnivariateFunction function;
  Interval domain;
  double epsilon = 0.0;
  Side side = Side::Under;
  double lambda = 0.9;
  std::vector<ParaPiece> pieces;

  std::size_t size() const { return pieces.size(); }
  /// max_k p_k(x) for Side::Under, min_k p_k(x) for Side::Over.
  double envelope(double x) const;
};

/// Bounds on the quadratic coefficient; feasible iff lower <= upper.
struct ABounds {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  bool feasible() const { return lower <= upper; }
};

/// Chord-crossing bound from a point x outside (upper bound on a) or inside
/// (lower bound on a) of [t_lo, t_hi]: with a = bound_A, p(x) = f(x).
double bound_A(const UnivariateFunction& f, double t_lo, double t_hi, double eps, double x);

/// Upper bound on a from an interior point: with a = bound_B, p(x) = f(x) - eps.
double bound_B(const UnivariateFunction& f, double t_lo, double t_hi, double x);

/// Same quantity as bound_B, written around f(t_hi) instead of f(t_lo).
double bound_B_rewritten(const UnivariateFunction& f, double t_lo, double t_hi, double x);

/// Endpoint-tangency limits of bound_B; the smaller one seeds the inner loop.
double initial_upper_a(const UnivariateFunction& f, double t_lo, double t_hi);

struct Coefficients {
  double b = 0.0;
  double c = 0.0;
};

/// (b, c) from the 2x2 system p(t_lo) = f(t_lo) - eps, p(t_hi) = f(t_hi) - eps.
Coefficients solve_bc(double a, double t_lo, double t_hi, const UnivariateFunction& f, double eps);

/// The same parabola from its closed-form parameterization in a.
Parabola parabola_from_a(double a, double t_lo, double t_hi, const UnivariateFunction& f, double eps);

enum class InnerStatus { Feasible, Infeasible, IterationLimit };

struct InnerLoopResult {
  InnerStatus status = InnerStatus::Infeasible;
  Parabola parabola;
  ABounds bounds;
  int iterations = 0;
  /// Coefficient a tried at each iteration (non-increasing).
  std::vector<double> a_history;

  bool feasible() const { return status == InnerStatus::Feasible; }
};

inline constexpr double kFeasibilityTolerance = 1e-9;
inline constexpr int kDefaultInnerIterations = 200;

/// Searches a parabola with p >= f - eps on D_loc and p <= f on D.
InnerLoopResult inner_loop(const UnivariateFunction& f, const Interval& D, const Interval& D_loc, double eps,
                           int max_iter = kDefaultInnerIterations);

struct OuterLoopStats {
  std::size_t inner_calls = 0;
  std::size_t inner_iterations = 0;
  std::size_t iteration_limits = 0;
};

/// Underestimating PARA approximation of f on D. Each infeasible candidate
/// [t_prev, t] is replaced by [t_prev, (1 - lambda) t_prev + lambda t].
ParaApproximation outer_loop(const UnivariateFunction& f, const Interval& D, double eps, double lambda = 0.9,
                             OuterLoopStats* stats = nullptr);

/// Variant that only covers `cover` with pieces while enforcing global
/// underestimation on the larger `global` interval.
ParaApproximation outer_loop_covering(const UnivariateFunction& f, const Interval& cover, const Interval& global,
                                      double eps, double lambda = 0.9, OuterLoopStats* stats = nullptr);

/// outer_loop on f (Side::Under) or on -f with every parabola negated (Side::Over).
ParaApproximation approximate(const UnivariateFunction& f, const Interval& D, double eps, Side side,
                              double lambda = 0.9, OuterLoopStats* stats = nullptr);

/// Uniform partition with a = -4L/delta on every piece, where
/// delta = |D| / ceil(3 L |D| / eps).
ParaApproximation theorem2_construct(const UnivariateFunction& f, const Interval& D, double eps, double L);

/// Maximum normalized violations found by dense sampling. All quantities are
/// divided by (1 + |f(x)|).
struct ViolationReport {
  double wrong_side = -std::numeric_limits<double>::infinity();  // envelope beyond f
  double gap = -std::numeric_limits<double>::infinity();         // envelope farther than eps from f
  std::vector<double> per_piece;                                  // each parabola beyond f on D
  std::size_t samples = 0;
  bool pass = false;

  double worst() const;
};

inline constexpr double kVerifySlack = 1e-8;

enum class Execution { Serial, Parallel };

ViolationReport verify(const ParaApproximation& approx, std::size_t samples = 100'000,
                       Execution exec = Execution::Parallel);

/// Structural checks: ordered pieces, shared endpoints, coverage of domain.
bool pieces_cover_domain(const ParaApproximation& approx);

}  // namespace pararelax
