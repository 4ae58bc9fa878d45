#include "pararelax/lut.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "pararelax/errors.hpp"
#include "pararelax/serialize.hpp"

namespace pararelax {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// k * 10^m, computed so that equal k give bit-identical results.
double grid_value(double k, int m) { return m >= 0 ? k * std::pow(10.0, m) : k / std::pow(10.0, -m); }

// 10^m <= |v| < 10^(m+1), checked against exact grid powers.
int decade(double v) {
  v = std::fabs(v);
  int m = static_cast<int>(std::floor(std::log10(v)));
  while (grid_value(1.0, m) > v) --m;
  while (grid_value(1.0, m + 1) <= v) ++m;
  return m;
}

double period_point(double k) { return k * kTwoPi; }

double floor_period(double v) {
  double k = std::floor(v / kTwoPi);
  while (period_point(k + 1) <= v) k += 1;
  while (period_point(k) > v) k -= 1;
  return k;
}

double ceil_period(double v) {
  double k = std::ceil(v / kTwoPi);
  while (period_point(k - 1) >= v) k -= 1;
  while (period_point(k) < v) k += 1;
  return k;
}

}  // namespace

double floor_to_decade_grid(double v, int m) {
  const double step = grid_value(1.0, m);
  double k = std::floor(v / step);
  while (grid_value(k + 1, m) <= v) k += 1;
  while (grid_value(k, m) > v) k -= 1;
  return grid_value(k, m);
}

double ceil_to_decade_grid(double v, int m) {
  const double step = grid_value(1.0, m);
  double k = std::ceil(v / step);
  while (grid_value(k - 1, m) >= v) k -= 1;
  while (grid_value(k, m) < v) k += 1;
  return grid_value(k, m);
}

Interval round_bounds(FunctionKind kind, const Interval& raw) {
  if (!(raw.lo <= raw.hi) || !std::isfinite(raw.lo) || !std::isfinite(raw.hi)) {
    throw DomainError("round_bounds: invalid interval");
  }
  switch (kind) {
    case FunctionKind::Exp: {
      double lo = raw.lo < -1.0 ? floor_to_decade_grid(raw.lo, decade(raw.lo)) : floor_to_decade_grid(raw.lo, -1);
      double hi = raw.hi <= 0.0 ? ceil_to_decade_grid(raw.hi, -1) : ceil_to_decade_grid(raw.hi, -2);
      return {lo, hi};
    }
    case FunctionKind::Ln: {
      if (!(raw.lo > 0.0)) throw DomainViolation("round_bounds: ln needs a positive lower bound");
      // band [10^(l-1), 10^l) rounds on the 10^(l-1) grid; l <= 3 for lo, l >= -1 for hi
      double lo = floor_to_decade_grid(raw.lo, std::min(decade(raw.lo), 2));
      double hi = ceil_to_decade_grid(raw.hi, std::max(decade(raw.hi), -2));
      return {lo, hi};
    }
    case FunctionKind::Sin:
    case FunctionKind::Cos: {
      Interval r{floor_to_decade_grid(raw.lo, -1), ceil_to_decade_grid(raw.hi, -1)};
      if (r.length() <= 4.0 * std::numbers::pi) return r;
      return {period_point(floor_period(raw.lo)), period_point(ceil_period(raw.hi))};
    }
  }
  return raw;
}

// ---------------------------------------------------------------------------

LookupTable::LookupTable(std::string cache_path) : path_(std::move(cache_path)) {
  std::ifstream in(path_);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      LutKey key;
      key.kind = parse_function_kind(j.at("kind").get<std::string>());
      key.domain = j.at("domain").get<Interval>();
      key.epsilon = j.at("epsilon").get<double>();
      key.side = parse_side(j.at("side").get<std::string>());
      entries_[key] = j.at("approximation").get<ParaApproximation>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path_ + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

const ParaApproximation* LookupTable::find(const LutKey& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

void LookupTable::store(const LutKey& key, const ParaApproximation& approx) {
  entries_[key] = approx;
  if (path_.empty()) return;
  nlohmann::json j{{"kind", std::string(to_string(key.kind))},
                   {"domain", key.domain},
                   {"epsilon", key.epsilon},
                   {"side", std::string(to_string(key.side))},
                   {"approximation", approx}};
  std::ofstream out(path_, std::ios::app);
  if (!out) throw Error("cannot append to look-up table file " + path_);
  out << j.dump() << '\n';
}

ParaApproximation periodic_approximation(FunctionKind kind, double L, int periods, double eps, Side side,
                                         double lambda) {
  if (periods < 1) throw DomainError("periodic_approximation: need at least one period");
  const UnivariateFunction f = UnivariateFunction::of(kind);
  const UnivariateFunction g = side == Side::Under ? f : flip_for_overestimation(f);
  const Interval cover{L, L + kTwoPi};
  // shifted copies must stay below g on the whole tiled domain
  const Interval global{L - kTwoPi * (periods - 1), L + kTwoPi * periods};
  ParaApproximation one = outer_loop_covering(g, cover, global, eps, lambda);

  ParaApproximation out;
  out.function = f;
  out.domain = {L, L + kTwoPi * periods};
  out.epsilon = eps;
  out.side = side;
  out.lambda = lambda;
  for (int j = 0; j < periods; ++j) {
    const double s = kTwoPi * j;
    for (std::size_t k = 0; k < one.pieces.size(); ++k) {
      const Parabola& p = one.pieces[k].parabola;
      // p(x - s)
      Parabola q{p.a, p.b - 2.0 * p.a * s, p.a * s * s - p.b * s + p.c};
      if (side == Side::Over) q = q.negated();
      Interval dom{one.pieces[k].piece_domain.lo + s, one.pieces[k].piece_domain.hi + s};
      if (!out.pieces.empty()) dom.lo = out.pieces.back().piece_domain.hi;
      out.pieces.push_back({q, dom});
    }
  }
  out.pieces.front().piece_domain.lo = out.domain.lo;
  out.pieces.back().piece_domain.hi = out.domain.hi;
  return out;
}

ParaApproximation lookup_or_compute(LookupTable& table, FunctionKind kind, const Interval& raw, double eps, Side side,
                                    double lambda, std::size_t verify_samples) {
  Interval rounded = round_bounds(kind, raw);
  const UnivariateFunction f = UnivariateFunction::of(kind);
  if (!f.valid_on(rounded)) rounded = raw;

  const LutKey key{kind, rounded, eps, side};
  if (const ParaApproximation* hit = table.find(key)) {
    table.count_hit();
    return *hit;
  }
  table.count_miss();

  ParaApproximation approx;
  const bool trig = kind == FunctionKind::Sin || kind == FunctionKind::Cos;
  if (trig && rounded.length() > 4.0 * std::numbers::pi) {
    const double k = floor_period(rounded.lo);
    const int periods = static_cast<int>(ceil_period(rounded.hi) - k);
    approx = periodic_approximation(kind, period_point(k), periods, eps, side, lambda);
    approx.domain = rounded;
    approx.pieces.front().piece_domain.lo = rounded.lo;
    approx.pieces.back().piece_domain.hi = rounded.hi;
  } else {
    approx = approximate(f, rounded, eps, side, lambda);
  }

  const ViolationReport report = verify(approx, verify_samples);
  if (!report.pass) {
    throw Error("look-up table entry for " + describe(f) + " failed verification (worst " +
                std::to_string(report.worst()) + ")");
  }
  table.store(key, approx);
  return approx;
}

}  // namespace pararelax
