#include "pararelax/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

#include "json.hpp"
#include "pararelax/errors.hpp"
#include "pararelax/optim1d.hpp"

namespace pararelax {

std::string_view to_string(Op op) {
  switch (op) {
    case Op::Add: return "add";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::Pow: return "pow";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Abs: return "abs";
    case Op::Neg: return "neg";
    case Op::Var: return "var";
    case Op::Const: return "const";
  }
  return "?";
}

int arity(Op op) {
  switch (op) {
    case Op::Add:
    case Op::Mul:
    case Op::Div:
    case Op::Pow: return 2;
    case Op::Var:
    case Op::Const: return 0;
    default: return 1;
  }
}

ExpressionNode ExpressionNode::constant(double v) {
  ExpressionNode n;
  n.op = Op::Const;
  n.value = v;
  return n;
}

ExpressionNode ExpressionNode::variable(int index) {
  ExpressionNode n;
  n.op = Op::Var;
  n.var_index = index;
  return n;
}

ExpressionNode ExpressionNode::unary(Op op, ExpressionNode child) {
  ExpressionNode n;
  n.op = op;
  n.children.push_back(std::move(child));
  return n;
}

ExpressionNode ExpressionNode::binary(Op op, ExpressionNode lhs, ExpressionNode rhs) {
  ExpressionNode n;
  n.op = op;
  n.children.push_back(std::move(lhs));
  n.children.push_back(std::move(rhs));
  return n;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

bool function_op(std::string_view name, Op& op) {
  if (name == "sin") op = Op::Sin;
  else if (name == "cos") op = Op::Cos;
  else if (name == "exp") op = Op::Exp;
  else if (name == "log" || name == "ln") op = Op::Log;
  else if (name == "abs") op = Op::Abs;
  else return false;
  return true;
}

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& names) : s_(text), names_(names) {}

  ExpressionNode run() {
    ExpressionNode n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(what, pos_); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  ExpressionNode expr() {
    ExpressionNode lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = ExpressionNode::binary(Op::Add, std::move(lhs), term());
      } else if (accept('-')) {
        lhs = ExpressionNode::binary(Op::Add, std::move(lhs), ExpressionNode::unary(Op::Neg, term()));
      } else {
        return lhs;
      }
    }
  }

  ExpressionNode term() {
    ExpressionNode lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = ExpressionNode::binary(Op::Mul, std::move(lhs), unary());
      } else if (accept('/')) {
        lhs = ExpressionNode::binary(Op::Div, std::move(lhs), unary());
      } else {
        return lhs;
      }
    }
  }

  ExpressionNode unary() {
    if (accept('-')) return ExpressionNode::unary(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  // '^' binds tighter than unary minus on its left and is right-associative.
  ExpressionNode power() {
    ExpressionNode base = primary();
    if (accept('^')) return ExpressionNode::binary(Op::Pow, std::move(base), unary());
    return base;
  }

  ExpressionNode primary() {
    char c = peek();
    if (c == '\0') fail("unexpected end of input");
    if (c == '(') {
      ++pos_;
      // "(-3.5)" is a negative literal, the form print() uses for constants
      const std::size_t open = pos_;
      if (accept('-') && (digit(peek()) || peek() == '.')) {
        ExpressionNode num = number();
        if (accept(')')) return ExpressionNode::constant(-num.value);
      }
      pos_ = open;
      ExpressionNode n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    if (digit(c) || c == '.') {
      ExpressionNode num = number();
      // implicit product: 3pi, 2(x1+1), 2x1
      char next = pos_ < s_.size() ? s_[pos_] : '\0';
      if (ident_start(next) || next == '(') return ExpressionNode::binary(Op::Mul, std::move(num), power());
      return num;
    }
    if (ident_start(c)) return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  ExpressionNode number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && digit(s_[pos_])) ++pos_;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() && digit(s_[pos_])) ++pos_;
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t k = pos_ + 1;
      if (k < s_.size() && (s_[k] == '+' || s_[k] == '-')) ++k;
      if (k < s_.size() && digit(s_[k])) {
        pos_ = k;
        while (pos_ < s_.size() && digit(s_[pos_])) ++pos_;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc() || ptr != s_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return ExpressionNode::constant(v);
  }

  ExpressionNode identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
    std::string name(s_.substr(start, pos_ - start));

    Op op{};
    if (function_op(name, op) && peek() == '(') {
      ++pos_;
      ExpressionNode arg = expr();
      if (!accept(')')) fail("expected ')' after function argument");
      return ExpressionNode::unary(op, std::move(arg));
    }
    if (!names_.empty()) {
      auto it = std::find(names_.begin(), names_.end(), name);
      if (it != names_.end()) return ExpressionNode::variable(static_cast<int>(it - names_.begin()));
    } else if (name.size() > 1 && name[0] == 'x' &&
               std::all_of(name.begin() + 1, name.end(), [](char ch) { return digit(ch); })) {
      int k = std::stoi(name.substr(1));
      if (k < 1) {
        pos_ = start;
        fail("variable indices start at x1");
      }
      return ExpressionNode::variable(k - 1);
    }
    if (name == "pi") return ExpressionNode::constant(std::numbers::pi);
    if (name == "e") return ExpressionNode::constant(std::numbers::e);
    pos_ = start;
    if (function_op(name, op)) fail("expected '(' after " + name);
    fail("unknown identifier '" + name + "'");
  }

  std::string_view s_;
  const std::vector<std::string>& names_;
  std::size_t pos_ = 0;
};

bool has_variables(const ExpressionNode& n) {
  if (n.op == Op::Var) return true;
  return std::any_of(n.children.begin(), n.children.end(), has_variables);
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ExpressionNode parse(std::string_view text, const std::vector<std::string>& names) {
  return Parser(text, names).run();
}

double parse_constant(std::string_view text) {
  static const std::vector<std::string> none;
  ExpressionNode n = parse(text, none);
  if (has_variables(n)) throw SyntaxError("constant expected, found a variable", 0);
  double v = evaluate(n, {});
  if (!std::isfinite(v)) throw DomainError("constant '" + std::string(text) + "' is not finite");
  return v;
}

std::string print(const ExpressionNode& node, const std::vector<std::string>& names) {
  switch (node.op) {
    case Op::Const:
      return node.value < 0 ? "(" + format_number(node.value) + ")" : format_number(node.value);
    case Op::Var:
      if (node.var_index >= 0 && static_cast<std::size_t>(node.var_index) < names.size()) return names[node.var_index];
      return "x" + std::to_string(node.var_index + 1);
    case Op::Neg: return "-(" + print(node.children[0], names) + ")";
    case Op::Add:
    case Op::Mul:
    case Op::Div:
    case Op::Pow: {
      const char* sym = node.op == Op::Add ? " + " : node.op == Op::Mul ? " * " : node.op == Op::Div ? " / " : "^";
      return "(" + print(node.children[0], names) + sym + print(node.children[1], names) + ")";
    }
    default: return std::string(to_string(node.op)) + "(" + print(node.children[0], names) + ")";
  }
}

void validate(const ExpressionNode& node, std::size_t dimension) {
  if (static_cast<int>(node.children.size()) != arity(node.op)) {
    throw DomainError(std::string(to_string(node.op)) + " node has wrong number of children");
  }
  if (node.op == Op::Var && (node.var_index < 0 || static_cast<std::size_t>(node.var_index) >= dimension)) {
    throw DomainError("variable index " + std::to_string(node.var_index) + " outside dimension " +
                      std::to_string(dimension));
  }
  for (const auto& c : node.children) validate(c, dimension);
}

double evaluate(const ExpressionNode& node, const std::vector<double>& x) {
  auto arg = [&](int k) { return evaluate(node.children[k], x); };
  switch (node.op) {
    case Op::Const: return node.value;
    case Op::Var: return x.at(node.var_index);
    case Op::Add: return arg(0) + arg(1);
    case Op::Mul: return arg(0) * arg(1);
    case Op::Div: return arg(0) / arg(1);
    case Op::Pow: return std::pow(arg(0), arg(1));
    case Op::Sin: return std::sin(arg(0));
    case Op::Cos: return std::cos(arg(0));
    case Op::Exp: return std::exp(arg(0));
    case Op::Log: return std::log(arg(0));
    case Op::Abs: return std::fabs(arg(0));
    case Op::Neg: return -arg(0);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Interval arithmetic

namespace {

Interval hull(std::initializer_list<double> v) { return {std::min(v), std::max(v)}; }

Interval mul(const Interval& a, const Interval& b) {
  return hull({a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi});
}

Interval reciprocal(const Interval& a) {
  if (a.lo <= 0.0 && a.hi >= 0.0) throw DomainViolation("division by an interval containing zero");
  return {1.0 / a.hi, 1.0 / a.lo};
}

Interval integer_power(const Interval& a, int n) {
  if (n == 0) return {1.0, 1.0};
  if (n < 0) return reciprocal(integer_power(a, -n));
  double lo = std::pow(a.lo, n), hi = std::pow(a.hi, n);
  if (n % 2 == 1) return {lo, hi};
  if (a.lo <= 0.0 && a.hi >= 0.0) return {0.0, std::max(lo, hi)};
  return hull({lo, hi});
}

// sin over [lo, hi], with extrema at pi/2 + 2k pi (max) and -pi/2 + 2k pi (min).
Interval sin_range(const Interval& a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (a.length() >= two_pi) return {-1.0, 1.0};
  Interval r = hull({std::sin(a.lo), std::sin(a.hi)});
  double k = std::ceil((a.lo - std::numbers::pi / 2) / two_pi);
  if (std::numbers::pi / 2 + two_pi * k <= a.hi) r.hi = 1.0;
  k = std::ceil((a.lo + std::numbers::pi / 2) / two_pi);
  if (-std::numbers::pi / 2 + two_pi * k <= a.hi) r.lo = -1.0;
  return r;
}

bool integer_valued(double v) { return std::isfinite(v) && v == std::nearbyint(v) && std::fabs(v) <= 64; }

}  // namespace

BoundsTree propagate_bounds(const ExpressionNode& node, const std::vector<Interval>& bounds) {
  BoundsTree t;
  for (const auto& c : node.children) t.children.push_back(propagate_bounds(c, bounds));
  auto ch = [&](int k) -> const Interval& { return t.children[k].range; };
  switch (node.op) {
    case Op::Const: t.range = {node.value, node.value}; break;
    case Op::Var:
      if (node.var_index < 0 || static_cast<std::size_t>(node.var_index) >= bounds.size()) {
        throw DomainError("no bounds for variable index " + std::to_string(node.var_index));
      }
      t.range = bounds[node.var_index];
      break;
    case Op::Add: t.range = {ch(0).lo + ch(1).lo, ch(0).hi + ch(1).hi}; break;
    case Op::Neg: t.range = {-ch(0).hi, -ch(0).lo}; break;
    case Op::Mul: t.range = mul(ch(0), ch(1)); break;
    case Op::Div: t.range = mul(ch(0), reciprocal(ch(1))); break;
    case Op::Pow: {
      const Interval& e = ch(1);
      if (e.lo != e.hi) throw UnsupportedOperation("pow needs a constant exponent");
      if (integer_valued(e.lo)) {
        t.range = integer_power(ch(0), static_cast<int>(e.lo));
      } else {
        if (ch(0).lo <= 0.0) throw DomainViolation("non-integer power of an interval reaching zero");
        t.range = hull({std::pow(ch(0).lo, e.lo), std::pow(ch(0).hi, e.lo)});
      }
      break;
    }
    case Op::Sin: t.range = sin_range(ch(0)); break;
    case Op::Cos: t.range = sin_range({ch(0).lo + std::numbers::pi / 2, ch(0).hi + std::numbers::pi / 2}); break;
    case Op::Exp: t.range = {std::exp(ch(0).lo), std::exp(ch(0).hi)}; break;
    case Op::Log:
      if (ch(0).lo <= 0.0) throw DomainViolation("log of an interval reaching zero");
      t.range = {std::log(ch(0).lo), std::log(ch(0).hi)};
      break;
    case Op::Abs: {
      const Interval& a = ch(0);
      if (a.lo >= 0.0) t.range = a;
      else if (a.hi <= 0.0) t.range = {-a.hi, -a.lo};
      else t.range = {0.0, std::max(-a.lo, a.hi)};
      break;
    }
  }
  if (!std::isfinite(t.range.lo) || !std::isfinite(t.range.hi)) {
    throw DomainViolation(std::string(to_string(node.op)) + " node has unbounded range");
  }
  return t;
}

Interval node_range(const ExpressionNode& node, const std::vector<Interval>& bounds) {
  return propagate_bounds(node, bounds).range;
}

// ---------------------------------------------------------------------------
// Polynomials and rows

std::string_view to_string(Sense sense) {
  switch (sense) {
    case Sense::Le: return "<=";
    case Sense::Ge: return ">=";
    case Sense::Eq: return "=";
  }
  return "?";
}

Sense parse_sense(std::string_view text) {
  if (text == "<=" || text == "le" || text == "L") return Sense::Le;
  if (text == ">=" || text == "ge" || text == "G") return Sense::Ge;
  if (text == "=" || text == "==" || text == "eq" || text == "E") return Sense::Eq;
  throw FormatError("unknown constraint sense '" + std::string(text) + "'");
}

double QuadExpr::evaluate(const std::vector<double>& x) const {
  double v = constant;
  for (const auto& [i, c] : linear) v += c * x[i];
  for (const auto& [ij, c] : quadratic) v += c * x[ij.first] * x[ij.second];
  return v;
}

void QuadExpr::prune() {
  std::erase_if(linear, [](const auto& kv) { return kv.second == 0.0; });
  std::erase_if(quadratic, [](const auto& kv) { return kv.second == 0.0; });
}

QuadExpr operator+(QuadExpr a, const QuadExpr& b) {
  a.constant += b.constant;
  for (const auto& [i, c] : b.linear) a.linear[i] += c;
  for (const auto& [ij, c] : b.quadratic) a.quadratic[ij] += c;
  a.prune();
  return a;
}

QuadExpr operator*(double s, QuadExpr a) {
  a.constant *= s;
  for (auto& kv : a.linear) kv.second *= s;
  for (auto& kv : a.quadratic) kv.second *= s;
  a.prune();
  return a;
}

QuadExpr multiply_affine(const QuadExpr& a, const QuadExpr& b) {
  if (!a.is_affine() || !b.is_affine()) throw UnsupportedOperation("product of non-affine expressions");
  QuadExpr r;
  r.constant = a.constant * b.constant;
  for (const auto& [i, c] : a.linear) r.linear[i] += c * b.constant;
  for (const auto& [i, c] : b.linear) r.linear[i] += c * a.constant;
  for (const auto& [i, ci] : a.linear) {
    for (const auto& [j, cj] : b.linear) r.quadratic[{std::min(i, j), std::max(i, j)}] += ci * cj;
  }
  r.prune();
  return r;
}

double Row::activity(const std::vector<double>& x) const {
  double v = 0.0;
  for (const auto& t : linear) v += t.coef * x[t.var];
  for (const auto& t : quadratic) v += t.coef * x[t.i] * x[t.j];
  return v;
}

bool Row::satisfied(const std::vector<double>& x, double tol) const {
  double a = activity(x), slack = tol * (1.0 + std::fabs(rhs));
  switch (sense) {
    case Sense::Le: return a <= rhs + slack;
    case Sense::Ge: return a >= rhs - slack;
    case Sense::Eq: return std::fabs(a - rhs) <= slack;
  }
  return false;
}

Row make_row(const QuadExpr& e, Sense sense, double rhs, std::string name) {
  Row r;
  for (const auto& [i, c] : e.linear) r.linear.push_back({i, c});
  for (const auto& [ij, c] : e.quadratic) r.quadratic.push_back({ij.first, ij.second, c});
  r.sense = sense;
  r.rhs = rhs - e.constant;
  r.name = std::move(name);
  return r;
}

std::size_t FactoredProblem::directions() const {
  std::size_t n = 0;
  for (const auto& u : univariate) n += u.sense == Sense::Eq ? 2 : 1;
  return n;
}

double FactoredProblem::objective_value(const std::vector<double>& x) const {
  double v = objective_constant;
  for (const auto& t : objective) v += t.coef * x[t.var];
  return v;
}

std::vector<double> FactoredProblem::complete(const std::vector<double>& original) const {
  std::vector<double> x(variables.size(), 0.0);
  std::copy_n(original.begin(), std::min(original.size(), original_variables), x.begin());
  for (const auto& aux : auxiliaries) {
    switch (aux.kind) {
      case AuxDefinition::Kind::Polynomial: x[aux.var] = aux.numerator.evaluate(x); break;
      case AuxDefinition::Kind::Quotient: x[aux.var] = aux.numerator.evaluate(x) / aux.denominator.evaluate(x); break;
      case AuxDefinition::Kind::Univariate: {
        const auto& u = univariate[aux.constraint];
        x[aux.var] = pararelax::evaluate(u.function, x[u.x_index]);
        break;
      }
    }
  }
  return x;
}

// ---------------------------------------------------------------------------
// Reformulation

namespace {

enum class Polarity { Pos, Neg, Both };

Polarity flip(Polarity p) {
  return p == Polarity::Pos ? Polarity::Neg : p == Polarity::Neg ? Polarity::Pos : Polarity::Both;
}

Polarity scaled(Polarity p, double s) { return s >= 0.0 ? p : flip(p); }

FunctionKind kind_of(Op op) {
  switch (op) {
    case Op::Sin: return FunctionKind::Sin;
    case Op::Cos: return FunctionKind::Cos;
    case Op::Exp: return FunctionKind::Exp;
    default: return FunctionKind::Ln;
  }
}

class Reformulator {
 public:
  explicit Reformulator(const ProblemInput& input) {
    for (const auto& v : input.variables) {
      if (!std::isfinite(v.lb) || !std::isfinite(v.ub) || v.lb > v.ub) {
        throw DomainError("variable '" + v.name + "' needs finite bounds lb <= ub");
      }
      user_bounds_.push_back({v.lb, v.ub});
      names_.insert(v.name);
    }
    p_.variables = input.variables;
    p_.original_variables = input.variables.size();
    p_.objective = input.objective;
    p_.objective_constant = input.objective_constant;
  }

  void add(const ExprConstraint& c, std::size_t index) {
    validate(c.lhs, p_.original_variables);
    Polarity pol = c.sense == Sense::Le ? Polarity::Pos : c.sense == Sense::Ge ? Polarity::Neg : Polarity::Both;
    QuadExpr e = lower(c.lhs, pol);
    p_.omega.push_back(make_row(e, c.sense, c.rhs, c.name.empty() ? "c" + std::to_string(index) : c.name));
  }

  FactoredProblem finish() { return std::move(p_); }

 private:
  QuadExpr constant(double v) {
    QuadExpr e;
    e.constant = v;
    return e;
  }

  QuadExpr single(int var) {
    QuadExpr e;
    e.linear[var] = 1.0;
    return e;
  }

  Interval range(const QuadExpr& e) const {
    Interval r{e.constant, e.constant};
    auto add = [&r](const Interval& t) {
      r.lo += t.lo;
      r.hi += t.hi;
    };
    for (const auto& [i, c] : e.linear) add(mul({c, c}, bound(i)));
    for (const auto& [ij, c] : e.quadratic) {
      Interval t = ij.first == ij.second ? integer_power(bound(ij.first), 2) : mul(bound(ij.first), bound(ij.second));
      add(mul({c, c}, t));
    }
    return r;
  }

  Interval bound(int i) const { return {p_.variables[i].lb, p_.variables[i].ub}; }

  std::string fresh(const std::string& prefix) {
    for (;;) {
      std::string name = prefix + std::to_string(++counter_);
      if (names_.insert(name).second) return name;
    }
  }

  int new_variable(const std::string& prefix, const Interval& r) {
    p_.variables.push_back({fresh(prefix), r.lo, r.hi, false});
    return static_cast<int>(p_.variables.size()) - 1;
  }

  // Auxiliary x~ = e with an equality row in omega.
  int auxiliary(const QuadExpr& e, const Interval& r) {
    int v = new_variable("_x", r);
    QuadExpr row = e + (-1.0) * single(v);
    p_.omega.push_back(make_row(row, Sense::Eq, 0.0, "def" + p_.variables[v].name));
    p_.auxiliaries.push_back({AuxDefinition::Kind::Polynomial, v, e, {}, -1});
    return v;
  }

  QuadExpr affine(const QuadExpr& e) {
    if (e.is_affine()) return e;
    return single(auxiliary(e, range(e)));
  }

  // Same, with a tighter enclosure known from the expression tree.
  QuadExpr affine(const QuadExpr& e, const Interval& known) {
    if (e.is_affine()) return e;
    Interval r = range(e);
    return single(auxiliary(e, {std::max(r.lo, known.lo), std::min(r.hi, known.hi)}));
  }

  QuadExpr lower(const ExpressionNode& n, Polarity pol) {
    if (!has_variables(n) && n.op != Op::Const) {
      node_range(n, user_bounds_);  // rejects log(0), 1/0
      double v = evaluate(n, {});
      if (!std::isfinite(v)) throw DomainViolation("constant subexpression is not finite");
      return constant(v);
    }
    switch (n.op) {
      case Op::Const: return constant(n.value);
      case Op::Var: return single(n.var_index);
      case Op::Neg: return (-1.0) * lower(n.children[0], flip(pol));
      case Op::Add: return lower(n.children[0], pol) + lower(n.children[1], pol);
      case Op::Mul: {
        const auto& a = n.children[0];
        const auto& b = n.children[1];
        if (!has_variables(a)) {
          double s = evaluate(a, {});
          return s * lower(b, scaled(pol, s));
        }
        if (!has_variables(b)) {
          double s = evaluate(b, {});
          return s * lower(a, scaled(pol, s));
        }
        return multiply_affine(affine(lower(a, Polarity::Both)), affine(lower(b, Polarity::Both)));
      }
      case Op::Div: {
        const auto& b = n.children[1];
        if (!has_variables(b)) {
          double s = evaluate(b, {});
          if (s == 0.0) throw DomainViolation("division by zero");
          return (1.0 / s) * lower(n.children[0], scaled(pol, s));
        }
        Interval r = node_range(n, user_bounds_);
        return quotient(lower(n.children[0], Polarity::Both), affine(lower(b, Polarity::Both), node_range(b, user_bounds_)), r);
      }
      case Op::Pow: return power(n, pol);
      case Op::Sin:
      case Op::Cos:
      case Op::Exp:
      case Op::Log: return unary_function(n, pol);
      case Op::Abs: {
        Interval r = node_range(n.children[0], user_bounds_);
        if (r.lo >= 0.0) return lower(n.children[0], pol);
        if (r.hi <= 0.0) return (-1.0) * lower(n.children[0], flip(pol));
        throw UnsupportedOperation("abs of an argument whose sign is not fixed by the bounds");
      }
    }
    throw UnsupportedOperation("unknown operation");
  }

  QuadExpr quotient(const QuadExpr& num, const QuadExpr& den, const Interval& r) {
    Interval d = range(den);
    if (d.lo <= 0.0 && d.hi >= 0.0) throw DomainViolation("division by an expression that can vanish");
    int w = new_variable("_w", r);
    QuadExpr row = multiply_affine(single(w), den) + (-1.0) * num;
    p_.omega.push_back(make_row(row, Sense::Eq, 0.0, "def" + p_.variables[w].name));
    p_.auxiliaries.push_back({AuxDefinition::Kind::Quotient, w, num, den, -1});
    return single(w);
  }

  QuadExpr power(const ExpressionNode& n, Polarity pol) {
    const auto& expo = n.children[1];
    if (has_variables(expo)) throw UnsupportedOperation("pow with a variable exponent");
    double e = evaluate(expo, {});
    if (!integer_valued(e)) throw UnsupportedOperation("pow needs an integer constant exponent");
    int k = static_cast<int>(e);
    if (k == 0) return constant(1.0);
    if (k == 1) return lower(n.children[0], pol);
    Interval r = node_range(n, user_bounds_);
    QuadExpr base = affine(lower(n.children[0], Polarity::Both));
    QuadExpr acc = base;
    for (int i = 2; i <= std::abs(k); ++i) acc = multiply_affine(affine(acc), base);
    if (k > 0) return acc;
    const ExpressionNode positive =
        ExpressionNode::binary(Op::Pow, n.children[0], ExpressionNode::constant(static_cast<double>(-k)));
    return quotient(constant(1.0), affine(acc, node_range(positive, user_bounds_)), r);
  }

  QuadExpr unary_function(const ExpressionNode& n, Polarity pol) {
    Interval node_r = node_range(n, user_bounds_);
    QuadExpr arg = lower(n.children[0], Polarity::Both);

    UnivariateFunction f = UnivariateFunction::of(kind_of(n.op));
    int x = -1;
    if (arg.is_affine() && arg.linear.size() == 1) {
      x = arg.linear.begin()->first;
      f.pre_scale = arg.linear.begin()->second;
      f.pre_shift = arg.constant;
    } else if (arg.is_constant()) {
      return constant(pararelax::evaluate(f, arg.constant));
    } else {
      x = auxiliary(arg, node_range(n.children[0], user_bounds_));
    }

    Interval domain = bound(x);
    if (!f.valid_on(domain)) throw DomainViolation(describe(f) + " is undefined on part of the variable bounds");

    Interval yr = node_r;
    if (domain.length() > 0.0) {
      auto fx = [&f](double t) { return jet(f, t); };
      auto neg = [&f](double t) {
        Jet j = jet(f, t);
        return Jet{-j.value, -j.slope, -j.curvature};
      };
      double hi = global_max(fx, domain).value;
      double lo = -global_max(neg, domain).value;
      yr = {std::max(node_r.lo, lo - 1e-9 * (1.0 + std::fabs(lo))), std::min(node_r.hi, hi + 1e-9 * (1.0 + std::fabs(hi)))};
      if (yr.lo > yr.hi) yr = node_r;
    } else {
      double v = pararelax::evaluate(f, domain.lo);
      yr = {v, v};
    }
    int y = new_variable("_y", yr);

    UnivariateConstraint u;
    u.function = f;
    u.x_index = x;
    u.y_index = y;
    u.domain = domain;
    u.sense = pol == Polarity::Pos ? Sense::Le : pol == Polarity::Neg ? Sense::Ge : Sense::Eq;
    u.name = "f" + std::to_string(p_.univariate.size());
    p_.univariate.push_back(u);
    p_.auxiliaries.push_back({AuxDefinition::Kind::Univariate, y, {}, {}, static_cast<int>(p_.univariate.size()) - 1});
    return single(y);
  }

  FactoredProblem p_;
  std::vector<Interval> user_bounds_;
  std::set<std::string> names_;
  int counter_ = 0;
};

}  // namespace

FactoredProblem reformulate(const ProblemInput& input) {
  Reformulator r(input);
  for (std::size_t k = 0; k < input.constraints.size(); ++k) r.add(input.constraints[k], k);
  return r.finish();
}

bool feasible(const ProblemInput& input, const std::vector<double>& x, double tol) {
  for (std::size_t i = 0; i < input.variables.size(); ++i) {
    const auto& v = input.variables[i];
    if (x[i] < v.lb - tol * (1 + std::fabs(v.lb)) || x[i] > v.ub + tol * (1 + std::fabs(v.ub))) return false;
  }
  for (const auto& c : input.constraints) {
    double a = evaluate(c.lhs, x), slack = tol * (1.0 + std::fabs(c.rhs));
    bool ok = c.sense == Sense::Le ? a <= c.rhs + slack : c.sense == Sense::Ge ? a >= c.rhs - slack
                                                                                : std::fabs(a - c.rhs) <= slack;
    if (!ok) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// JSON envelope

namespace {

double number_field(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_constant(j.get<std::string>());
  throw FormatError("expected a number or a constant expression");
}

// Splits "lhs <= rhs" at the first top-level relational operator.
bool split_relation(const std::string& text, std::string& lhs, std::string& rhs, Sense& sense) {
  for (std::size_t i = 0; i + 1 < text.size(); ++i) {
    std::string op = text.substr(i, 2);
    if (op == "<=" || op == ">=" || op == "==") {
      lhs = text.substr(0, i);
      rhs = text.substr(i + 2);
      sense = parse_sense(op);
      return true;
    }
  }
  return false;
}

// Affine expression over the user's variables, for objectives.
void linear_form(const ExpressionNode& n, double scale, std::map<int, double>& coeffs, double& constant) {
  switch (n.op) {
    case Op::Const: constant += scale * n.value; return;
    case Op::Var: coeffs[n.var_index] += scale; return;
    case Op::Neg: linear_form(n.children[0], -scale, coeffs, constant); return;
    case Op::Add:
      linear_form(n.children[0], scale, coeffs, constant);
      linear_form(n.children[1], scale, coeffs, constant);
      return;
    case Op::Mul:
      if (!has_variables(n.children[0])) return linear_form(n.children[1], scale * evaluate(n.children[0], {}), coeffs, constant);
      if (!has_variables(n.children[1])) return linear_form(n.children[0], scale * evaluate(n.children[1], {}), coeffs, constant);
      break;
    case Op::Div:
      if (!has_variables(n.children[1])) return linear_form(n.children[0], scale / evaluate(n.children[1], {}), coeffs, constant);
      break;
    default:
      if (!has_variables(n)) {
        constant += scale * evaluate(n, {});
        return;
      }
  }
  throw UnsupportedOperation("objective must be linear");
}

}  // namespace

ProblemInput parse_problem(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SyntaxError(std::string("invalid JSON: ") + e.what(), e.byte);
  }
  ProblemInput in;
  std::vector<std::string> names;
  try {
    for (const auto& v : j.at("variables")) {
      Variable var;
      var.name = v.at("name").get<std::string>();
      var.lb = number_field(v.at("lb"));
      var.ub = number_field(v.at("ub"));
      var.integer = v.value("integer", false);
      if (std::find(names.begin(), names.end(), var.name) != names.end()) {
        throw FormatError("duplicate variable '" + var.name + "'");
      }
      names.push_back(var.name);
      in.variables.push_back(var);
    }

    std::map<int, double> coeffs;
    const auto& obj = j.at("objective");
    if (obj.is_string()) {
      linear_form(parse(obj.get<std::string>(), names), 1.0, coeffs, in.objective_constant);
    } else {
      if (obj.value("sense", std::string("min")) != "min") throw FormatError("only minimization is supported");
      for (const auto& [name, c] : obj.at("coeffs").items()) {
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw FormatError("objective names unknown variable '" + name + "'");
        coeffs[static_cast<int>(it - names.begin())] += c.get<double>();
      }
      in.objective_constant = obj.value("constant", 0.0);
    }
    for (const auto& [i, c] : coeffs) {
      if (c != 0.0) in.objective.push_back({i, c});
    }

    for (const auto& c : j.value("constraints", nlohmann::json::array())) {
      ExprConstraint ec;
      std::string text = c.at("expr").get<std::string>(), lhs, rhs;
      ec.rhs = c.contains("rhs") ? number_field(c.at("rhs")) : 0.0;
      ec.sense = c.contains("sense") ? parse_sense(c.at("sense").get<std::string>()) : Sense::Le;
      if (split_relation(text, lhs, rhs, ec.sense)) {
        ec.lhs = ExpressionNode::binary(Op::Add, parse(lhs, names), ExpressionNode::unary(Op::Neg, parse(rhs, names)));
      } else {
        ec.lhs = parse(text, names);
      }
      ec.name = c.value("name", std::string());
      in.constraints.push_back(std::move(ec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("problem envelope: ") + e.what());
  }
  return in;
}

}  // namespace pararelax
