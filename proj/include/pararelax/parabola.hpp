#pragma once

#include "pararelax/functions.hpp"

namespace pararelax {

/// p(x) = a x^2 + b x + c
struct Parabola {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double operator()(double x) const { return (a * x + b) * x + c; }
  double slope(double x) const { return 2.0 * a * x + b; }
  double curvature() const { return 2.0 * a; }
  Parabola negated() const { return Parabola{-a, -b, -c}; }
  bool operator==(const Parabola&) const = default;
};

}  // namespace pararelax
