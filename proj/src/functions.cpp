#include "pararelax/functions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pararelax/errors.hpp"
#include "pararelax/optim1d.hpp"

namespace pararelax {

Interval make_interval(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
    std::ostringstream os;
    os << "invalid interval [" << lo << ", " << hi << "]";
    throw DomainError(os.str());
  }
  return Interval{lo, hi};
}

std::string_view to_string(FunctionKind kind) {
  switch (kind) {
    case FunctionKind::Sin: return "sin";
    case FunctionKind::Cos: return "cos";
    case FunctionKind::Exp: return "exp";
    case FunctionKind::Ln: return "ln";
  }
  return "?";
}

FunctionKind parse_function_kind(std::string_view name) {
  if (name == "sin") return FunctionKind::Sin;
  if (name == "cos") return FunctionKind::Cos;
  if (name == "exp") return FunctionKind::Exp;
  if (name == "ln" || name == "log") return FunctionKind::Ln;
  throw DomainError("unknown function kind '" + std::string(name) + "'");
}

bool UnivariateFunction::valid_at(double x) const {
  if (!std::isfinite(x)) return false;
  return kind != FunctionKind::Ln || inner(x) > 0.0;
}

bool UnivariateFunction::valid_on(const Interval& I) const {
  return valid_at(I.lo) && valid_at(I.hi);
}

namespace {

// k^(order)(u) for the elementary kind, order 0..4.
double kind_derivative(FunctionKind kind, double u, int order) {
  switch (kind) {
    case FunctionKind::Sin:
      switch (order % 4) {
        case 0: return std::sin(u);
        case 1: return std::cos(u);
        case 2: return -std::sin(u);
        default: return -std::cos(u);
      }
    case FunctionKind::Cos:
      switch (order % 4) {
        case 0: return std::cos(u);
        case 1: return -std::sin(u);
        case 2: return -std::cos(u);
        default: return std::sin(u);
      }
    case FunctionKind::Exp:
      return std::exp(u);
    case FunctionKind::Ln:
      switch (order) {
        case 0: return std::log(u);
        case 1: return 1.0 / u;
        case 2: return -1.0 / (u * u);
        default: return 2.0 / (u * u * u);
      }
  }
  return 0.0;
}

void check_valid(const UnivariateFunction& f, double x) {
  if (!f.valid_at(x)) {
    std::ostringstream os;
    os << describe(f) << " is undefined at x = " << x;
    throw DomainError(os.str());
  }
}

}  // namespace

double evaluate(const UnivariateFunction& f, double x) {
  check_valid(f, x);
  const double v = f.post_scale * kind_derivative(f.kind, f.inner(x), 0) + f.post_shift;
  return f.negated ? -v : v;
}

double derivative(const UnivariateFunction& f, double x, int order) {
  if (order < 1 || order > 3) throw DomainError("derivative order must be 1, 2 or 3");
  check_valid(f, x);
  double chain = f.post_scale;
  for (int i = 0; i < order; ++i) chain *= f.pre_scale;
  const double d = chain * kind_derivative(f.kind, f.inner(x), order);
  return f.negated ? -d : d;
}

Jet jet(const UnivariateFunction& f, double x) {
  check_valid(f, x);
  const double u = f.inner(x);
  const double s = f.pre_scale;
  const double sign = f.negated ? -1.0 : 1.0;
  Jet j;
  j.value = sign * (f.post_scale * kind_derivative(f.kind, u, 0) + f.post_shift);
  j.slope = sign * f.post_scale * s * kind_derivative(f.kind, u, 1);
  j.curvature = sign * f.post_scale * s * s * kind_derivative(f.kind, u, 2);
  return j;
}

double lipschitz_bound(const UnivariateFunction& f, const Interval& I) {
  if (!(I.lo <= I.hi) || !f.valid_on(I)) throw DomainError("lipschitz_bound: interval outside validity region");
  auto up = [&](double x) { return Jet{derivative(f, x, 1), derivative(f, x, 2), derivative(f, x, 3)}; };
  auto down = [&](double x) { return Jet{-derivative(f, x, 1), -derivative(f, x, 2), -derivative(f, x, 3)}; };
  const double hi = global_max(up, I).value;
  const double lo = global_max(down, I).value;
  const double L = std::max({hi, lo, 0.0});
  return L * (1.0 + 1e-9);
}

UnivariateFunction flip_for_overestimation(const UnivariateFunction& f) {
  UnivariateFunction g = f;
  g.negated = !g.negated;
  return g;
}

std::vector<double> inflection_points(const UnivariateFunction& f, const Interval& I) {
  std::vector<double> out;
  const bool periodic = f.kind == FunctionKind::Sin || f.kind == FunctionKind::Cos;
  if (!periodic || f.post_scale == 0.0 || f.pre_scale == 0.0 || !(I.lo < I.hi)) return out;
  // sin'' vanishes at u = k pi, cos'' at u = pi/2 + k pi.
  const double phase = f.kind == FunctionKind::Sin ? 0.0 : 0.5 * M_PI;
  const double u0 = std::min(f.inner(I.lo), f.inner(I.hi));
  const double u1 = std::max(f.inner(I.lo), f.inner(I.hi));
  for (double k = std::ceil((u0 - phase) / M_PI); phase + k * M_PI <= u1; k += 1.0) {
    const double x = (phase + k * M_PI - f.pre_shift) / f.pre_scale;
    if (x > I.lo && x < I.hi) out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string describe(const UnivariateFunction& f) {
  std::ostringstream os;
  if (f.negated) os << "-";
  const bool plain_post = f.post_scale == 1.0 && f.post_shift == 0.0;
  if (!plain_post) os << "(" << f.post_scale << "*";
  os << to_string(f.kind) << "(";
  if (f.pre_scale == 1.0 && f.pre_shift == 0.0) {
    os << "x";
  } else {
    os << f.pre_scale << "*x" << (f.pre_shift < 0 ? "" : "+") << f.pre_shift;
  }
  os << ")";
  if (!plain_post) os << (f.post_shift < 0 ? "" : "+") << f.post_shift << ")";
  return os.str();
}

}  // namespace pararelax
