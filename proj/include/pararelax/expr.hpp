#pragma once

// Factorable expressions: an infix parser, interval bound propagation and the
// reformulation into linear/quadratic rows plus univariate constraints
// f(x_i) <= y_j (or >=, or both).

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pararelax/functions.hpp"

namespace pararelax {

enum class Op { Add, Mul, Div, Pow, Sin, Cos, Exp, Log, Abs, Neg, Var, Const };

std::string_view to_string(Op op);
/// Number of children the op takes (0, 1 or 2).
int arity(Op op);

struct ExpressionNode {
  Op op = Op::Const;
  std::vector<ExpressionNode> children;
  int var_index = -1;  // Var only, 0-based
  double value = 0.0;  // Const only

  bool operator==(const ExpressionNode&) const = default;

  static ExpressionNode constant(double v);
  static ExpressionNode variable(int index);
  static ExpressionNode unary(Op op, ExpressionNode child);
  static ExpressionNode binary(Op op, ExpressionNode lhs, ExpressionNode rhs);
};

/// Parses an infix expression. Identifiers resolve against `names` (0-based
/// position); with an empty list, x1..xn denote variables 0..n-1. `pi` and
/// `e` are constants unless shadowed by a variable name. A number directly
/// followed by an identifier or '(' multiplies it ("3pi").
ExpressionNode parse(std::string_view text, const std::vector<std::string>& names = {});

/// Parses a closed-form numeric constant such as "-pi/2", "e^-4" or "3pi".
double parse_constant(std::string_view text);

/// Fully parenthesized text that parses back to the same tree.
std::string print(const ExpressionNode& node, const std::vector<std::string>& names = {});

/// Throws DomainError on arity or variable-index violations.
void validate(const ExpressionNode& node, std::size_t dimension);

double evaluate(const ExpressionNode& node, const std::vector<double>& x);

/// Interval enclosure of every node; children mirror the expression tree.
struct BoundsTree {
  Interval range;
  std::vector<BoundsTree> children;
};

BoundsTree propagate_bounds(const ExpressionNode& node, const std::vector<Interval>& bounds);

/// Range of the root only.
Interval node_range(const ExpressionNode& node, const std::vector<Interval>& bounds);

// ---------------------------------------------------------------------------
// Factored problem

enum class Sense { Le, Ge, Eq };

std::string_view to_string(Sense sense);
Sense parse_sense(std::string_view text);

struct LinearTerm {
  int var = 0;
  double coef = 0.0;
  bool operator==(const LinearTerm&) const = default;
};

/// coef * x_i * x_j with i <= j; i == j is a square.
struct QuadTerm {
  int i = 0;
  int j = 0;
  double coef = 0.0;
  bool operator==(const QuadTerm&) const = default;
};

/// Polynomial of degree <= 2 with deterministic term order.
struct QuadExpr {
  double constant = 0.0;
  std::map<int, double> linear;
  std::map<std::pair<int, int>, double> quadratic;

  bool operator==(const QuadExpr&) const = default;

  bool is_constant() const { return linear.empty() && quadratic.empty(); }
  bool is_affine() const { return quadratic.empty(); }
  double evaluate(const std::vector<double>& x) const;
  /// Drops exact-zero coefficients.
  void prune();
};

QuadExpr operator+(QuadExpr a, const QuadExpr& b);
QuadExpr operator*(double s, QuadExpr a);
/// Product of two affine expressions.
QuadExpr multiply_affine(const QuadExpr& a, const QuadExpr& b);

struct Row {
  std::vector<LinearTerm> linear;
  std::vector<QuadTerm> quadratic;
  Sense sense = Sense::Le;
  double rhs = 0.0;
  std::string name;

  bool operator==(const Row&) const = default;

  bool is_linear() const { return quadratic.empty(); }
  double activity(const std::vector<double>& x) const;
  /// Row satisfied with absolute tolerance tol * (1 + |rhs|).
  bool satisfied(const std::vector<double>& x, double tol = 1e-9) const;
};

/// lhs sense rhs where the left side is the expression's non-constant part.
Row make_row(const QuadExpr& e, Sense sense, double rhs, std::string name);

struct Variable {
  std::string name;
  double lb = 0.0;
  double ub = 0.0;
  bool integer = false;
  bool operator==(const Variable&) const = default;
};

/// f(x) sense y with f already carrying any affine argument transform.
struct UnivariateConstraint {
  UnivariateFunction function;
  int x_index = 0;
  int y_index = 0;
  Interval domain;  // bounds of x
  Sense sense = Sense::Le;
  std::string name;
};

/// How an auxiliary variable is recovered from earlier variables.
struct AuxDefinition {
  enum class Kind { Polynomial, Quotient, Univariate };
  Kind kind = Kind::Polynomial;
  int var = 0;
  QuadExpr numerator;    // Polynomial and Quotient
  QuadExpr denominator;  // Quotient
  int constraint = -1;   // Univariate: index into univariate
};

struct FactoredProblem {
  std::vector<Variable> variables;
  std::size_t original_variables = 0;  // the first entries are the user's
  std::vector<LinearTerm> objective;
  double objective_constant = 0.0;
  std::vector<Row> omega;
  std::vector<UnivariateConstraint> univariate;
  std::vector<AuxDefinition> auxiliaries;  // creation order

  /// Count of univariate directions (an Eq entry counts twice).
  std::size_t directions() const;
  double objective_value(const std::vector<double>& x) const;
  /// Extends an assignment of the original variables by the auxiliary
  /// definitions (y_j = f_j(x_{i_j})).
  std::vector<double> complete(const std::vector<double>& original) const;
};

struct ExprConstraint {
  ExpressionNode lhs;
  Sense sense = Sense::Le;
  double rhs = 0.0;
  std::string name;
};

struct ProblemInput {
  std::vector<Variable> variables;
  std::vector<LinearTerm> objective;
  double objective_constant = 0.0;
  std::vector<ExprConstraint> constraints;
};

/// Rewrites every constraint into rows of degree <= 2 and univariate
/// constraints. Unary nodes reached only with positive (negative) sign from
/// a <= constraint get a one-sided f <= y (f >= y); all others get both.
FactoredProblem reformulate(const ProblemInput& input);

/// Original-problem feasibility at a point of the user's variables.
bool feasible(const ProblemInput& input, const std::vector<double>& x, double tol = 1e-9);

/// Reads the JSON problem envelope
///   {variables:[{name,lb,ub,integer}], objective:{coeffs:{name:c}, constant},
///    constraints:[{expr, sense?, rhs?, name?}]}
/// where expr may itself contain one of <=, >=, ==.
ProblemInput parse_problem(std::string_view json_text);

}  // namespace pararelax
