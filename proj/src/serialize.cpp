#include "pararelax/serialize.hpp"

#include <cmath>

#include "pararelax/errors.hpp"

namespace pararelax {

using nlohmann::json;

void to_json(json& j, const Interval& I) { j = json::array({I.lo, I.hi}); }

void from_json(const json& j, Interval& I) {
  if (!j.is_array() || j.size() != 2) throw FormatError("interval must be a two-element array");
  I = make_interval(j[0].get<double>(), j[1].get<double>());
}

void to_json(json& j, const UnivariateFunction& f) {
  j = json{{"kind", std::string(to_string(f.kind))},
           {"pre_scale", f.pre_scale},
           {"pre_shift", f.pre_shift},
           {"post_scale", f.post_scale},
           {"post_shift", f.post_shift},
           {"negated", f.negated}};
}

void from_json(const json& j, UnivariateFunction& f) {
  f = UnivariateFunction{};
  f.kind = parse_function_kind(j.at("kind").get<std::string>());
  f.pre_scale = j.value("pre_scale", 1.0);
  f.pre_shift = j.value("pre_shift", 0.0);
  f.post_scale = j.value("post_scale", 1.0);
  f.post_shift = j.value("post_shift", 0.0);
  f.negated = j.value("negated", false);
}

void to_json(json& j, const ParaApproximation& a) {
  json pieces = json::array();
  for (const auto& piece : a.pieces) {
    pieces.push_back({{"a", piece.parabola.a},
                      {"b", piece.parabola.b},
                      {"c", piece.parabola.c},
                      {"t_lo", piece.piece_domain.lo},
                      {"t_hi", piece.piece_domain.hi}});
  }
  j = json{{"function", a.function},
           {"domain", a.domain},
           {"epsilon", a.epsilon},
           {"side", std::string(to_string(a.side))},
           {"lambda", a.lambda},
           {"pieces", std::move(pieces)}};
}

void from_json(const json& j, ParaApproximation& a) {
  a = ParaApproximation{};
  a.function = j.at("function").get<UnivariateFunction>();
  a.domain = j.at("domain").get<Interval>();
  a.epsilon = j.at("epsilon").get<double>();
  a.side = parse_side(j.at("side").get<std::string>());
  a.lambda = j.value("lambda", 0.9);
  for (const auto& p : j.at("pieces")) {
    a.pieces.push_back(ParaPiece{Parabola{p.at("a").get<double>(), p.at("b").get<double>(), p.at("c").get<double>()},
                                 Interval{p.at("t_lo").get<double>(), p.at("t_hi").get<double>()}});
  }
}

void to_json(json& j, const PwlApproximation& p) {
  j = json{{"function", p.function}, {"domain", p.domain},       {"epsilon", p.epsilon},
           {"shift", p.shift},       {"breakpoints", p.breakpoints}, {"values", p.values}};
}

void from_json(const json& j, PwlApproximation& p) {
  p = PwlApproximation{};
  p.function = j.at("function").get<UnivariateFunction>();
  p.domain = j.at("domain").get<Interval>();
  p.epsilon = j.at("epsilon").get<double>();
  p.shift = j.value("shift", 0.0);
  p.breakpoints = j.at("breakpoints").get<std::vector<double>>();
  p.values = j.at("values").get<std::vector<double>>();
  if (p.breakpoints.size() < 2 || p.values.size() != p.breakpoints.size()) {
    throw FormatError("pwl approximation needs matching breakpoints and values (at least two)");
  }
}

namespace {
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
}  // namespace

void to_json(json& j, const ViolationReport& r) {
  json per_piece = json::array();
  for (double v : r.per_piece) per_piece.push_back(finite_or_null(v));
  j = json{{"wrong_side", finite_or_null(r.wrong_side)},
           {"gap", finite_or_null(r.gap)},
           {"per_piece", std::move(per_piece)},
           {"samples", r.samples},
           {"slack", kVerifySlack},
           {"status", r.pass ? "PASS" : "FAIL"}};
}

void to_json(json& j, const PwlViolationReport& r) {
  j = json{{"above", finite_or_null(r.above)},
           {"below", finite_or_null(r.below)},
           {"samples", r.samples},
           {"status", r.pass ? "PASS" : "FAIL"}};
}

}  // namespace pararelax
