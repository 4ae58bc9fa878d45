#pragma once

// Small problems with at most two gridded continuous variables, used by the
// emit tests and the acceptance checks.

#include <string>
#include <vector>

#include "pararelax/expr.hpp"

namespace toys {

struct Toy {
  std::string label;
  pararelax::ProblemInput input;
};

inline pararelax::ProblemInput minimize_y(std::vector<pararelax::Variable> vars, const std::string& lhs) {
  using namespace pararelax;
  ProblemInput in;
  in.variables = std::move(vars);
  std::vector<std::string> names;
  for (const auto& v : in.variables) names.push_back(v.name);
  const int y = static_cast<int>(in.variables.size()) - 1;
  in.objective = {{y, 1.0}};
  in.constraints.push_back({parse(lhs + " - y", names), Sense::Le, 0.0, "link"});
  return in;
}

inline std::vector<Toy> sandwich_toys() {
  constexpr double pi = 3.14159265358979323846;
  return {
      {"sin", minimize_y({{"x", 0, 2 * pi}, {"y", -2, 2}}, "sin(x)")},
      {"cos_line", minimize_y({{"x", 0, 2 * pi}, {"y", -3, 3}}, "cos(x) + 0.1*x")},
      {"line_log", minimize_y({{"x", 0.2, 5}, {"y", -5, 5}}, "0.5*x - log(x)")},
      {"exp_int", minimize_y({{"x", -2, 2}, {"z", 0, 3, true}, {"y", -5, 5}}, "exp(0.5*x) - z")},
      {"sin_product", minimize_y({{"a", 1, 2}, {"b", 0, pi}, {"y", -2, 2}}, "sin(a*b)")},
  };
}

}  // namespace toys
