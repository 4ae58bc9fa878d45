#pragma once

// JSON forms of the public value types (nlohmann/json ADL hooks).

#include "json.hpp"
#include "pararelax/functions.hpp"
#include "pararelax/para.hpp"
#include "pararelax/pwl.hpp"

namespace pararelax {

void to_json(nlohmann::json& j, const Interval& I);
void from_json(const nlohmann::json& j, Interval& I);

void to_json(nlohmann::json& j, const UnivariateFunction& f);
void from_json(const nlohmann::json& j, UnivariateFunction& f);

void to_json(nlohmann::json& j, const ParaApproximation& a);
void from_json(const nlohmann::json& j, ParaApproximation& a);

void to_json(nlohmann::json& j, const PwlApproximation& p);
void from_json(const nlohmann::json& j, PwlApproximation& p);

void to_json(nlohmann::json& j, const ViolationReport& r);
void to_json(nlohmann::json& j, const PwlViolationReport& r);

}  // namespace pararelax
