#pragma once

// Dense-sampling kernels behind verification. Each kernel has an OpenMP
// version and a serial reference that must agree bit-for-bit on maxima.

#include <cstddef>

#include "pararelax/para.hpp"
#include "pararelax/pwl.hpp"

namespace pararelax::sampling {

/// Sample abscissae: samples + 1 uniform points on the domain.
double sample_point(const Interval& D, std::size_t i, std::size_t samples);

ViolationReport para_violations_serial(const ParaApproximation& approx, std::size_t samples);
ViolationReport para_violations_parallel(const ParaApproximation& approx, std::size_t samples);

PwlViolationReport pwl_violations_serial(const PwlApproximation& pwl, std::size_t samples);
PwlViolationReport pwl_violations_parallel(const PwlApproximation& pwl, std::size_t samples);

/// Threads OpenMP will use (1 without OpenMP).
int max_threads();

}  // namespace pararelax::sampling
