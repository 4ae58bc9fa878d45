#pragma once

// Look-up table of precomputed PARA approximations. Raw variable bounds are
// rounded to a coarse canonical grid so that many raw intervals share one
// entry; the stored approximation covers the rounded interval.

#include <cstddef>
#include <map>
#include <string>
#include <tuple>

#include "pararelax/functions.hpp"
#include "pararelax/para.hpp"

namespace pararelax {

/// Canonical enclosing interval for an elementary kind. Idempotent, and the
/// result always contains `raw`. Throws DomainViolation for ln with lo <= 0.
Interval round_bounds(FunctionKind kind, const Interval& raw);

/// Largest k * 10^m <= v (smallest >= v for the ceil variant); exact on
/// values already on the grid.
double floor_to_decade_grid(double v, int m);
double ceil_to_decade_grid(double v, int m);

struct LutKey {
  FunctionKind kind = FunctionKind::Sin;
  Interval domain;  // rounded
  double epsilon = 0.0;
  Side side = Side::Under;

  auto tie() const { return std::tuple(static_cast<int>(kind), domain.lo, domain.hi, epsilon, static_cast<int>(side)); }
  bool operator<(const LutKey& o) const { return tie() < o.tie(); }
  bool operator==(const LutKey& o) const { return tie() == o.tie(); }
};

/// In-memory table, optionally mirrored to a JSON-lines file (one entry per
/// line, appended on store). Single writer.
class LookupTable {
 public:
  LookupTable() = default;
  /// Loads any entries already present in the file; new entries are appended.
  explicit LookupTable(std::string cache_path);

  const ParaApproximation* find(const LutKey& key) const;
  void store(const LutKey& key, const ParaApproximation& approx);

  std::size_t size() const { return entries_.size(); }
  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }
  const std::string& path() const { return path_; }

  void count_hit() { ++hits_; }
  void count_miss() { ++misses_; }

 private:
  std::map<LutKey, ParaApproximation> entries_;
  std::string path_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

/// Approximation of the plain elementary function on round_bounds(raw).
/// Trigonometric domains longer than 4*pi are served by one period that is
/// computed under a widened global constraint, then shifted and tiled.
/// Every fresh entry is verified before it is stored.
ParaApproximation lookup_or_compute(LookupTable& table, FunctionKind kind, const Interval& raw, double eps, Side side,
                                    double lambda = 0.9, std::size_t verify_samples = 100'000);

/// Periodic tiling used by lookup_or_compute: pieces of one period
/// [L, L + 2 pi] are shifted to cover [L, L + 2 pi n].
ParaApproximation periodic_approximation(FunctionKind kind, double L, int periods, double eps, Side side,
                                         double lambda = 0.9);

}  // namespace pararelax
