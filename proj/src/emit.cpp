#include "pararelax/emit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "json.hpp"
#include "pararelax/errors.hpp"
#include "pararelax/serialize.hpp"

namespace pararelax {

std::size_t RelaxedModel::quadratic_rows() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const ModelRow& r) { return !r.row.is_linear(); }));
}

std::size_t RelaxedModel::integer_variables() const {
  return static_cast<std::size_t>(
      std::count_if(variables.begin(), variables.end(), [](const Variable& v) { return v.integer; }));
}

int RelaxedModel::find_variable(std::string_view name) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

RelaxedModel omega_model(const FactoredProblem& problem) {
  RelaxedModel m;
  m.variables = problem.variables;
  m.objective = problem.objective;
  m.objective_constant = problem.objective_constant;
  for (const auto& r : problem.omega) m.rows.push_back({r, Provenance{}});
  return m;
}

namespace {

void check_match(const UnivariateConstraint& u, const UnivariateFunction& f, const Interval& domain, int j) {
  if (!(f == u.function)) {
    throw DomainMismatch("approximation " + std::to_string(j) + " is for " + describe(f) + ", constraint has " +
                         describe(u.function));
  }
  if (!domain.contains(u.domain)) {
    std::ostringstream os;
    os << "approximation " << j << " covers [" << domain.lo << ", " << domain.hi << "] but the variable ranges over ["
       << u.domain.lo << ", " << u.domain.hi << "]";
    throw DomainMismatch(os.str());
  }
}

bool wants_under(Sense s) { return s != Sense::Ge; }
bool wants_over(Sense s) { return s != Sense::Le; }

ModelRow parabola_row(const Parabola& p, int x, int y, bool over, int j, int k) {
  const double s = over ? -1.0 : 1.0;
  Row r;
  if (p.a != 0.0) r.quadratic.push_back({x, x, s * p.a});
  if (p.b != 0.0) r.linear.push_back({x, s * p.b});
  r.linear.push_back({y, -s});
  r.sense = Sense::Le;
  r.rhs = -s * p.c;
  r.name = "para" + std::to_string(j) + (over ? "_o" : "_u") + std::to_string(k);
  return {r, Provenance{"para", over ? "over" : "under", j, k}};
}

}  // namespace

RelaxedModel emit_para(const FactoredProblem& problem, const std::vector<ParaRelaxation>& approximations) {
  if (approximations.size() != problem.univariate.size()) {
    throw DomainMismatch("emit_para: one approximation entry per univariate constraint expected");
  }
  RelaxedModel m = omega_model(problem);
  m.technique = "para";
  for (std::size_t j = 0; j < approximations.size(); ++j) {
    const auto& u = problem.univariate[j];
    const auto& entry = approximations[j];
    for (int over = 0; over < 2; ++over) {
      if (over ? !wants_over(u.sense) : !wants_under(u.sense)) continue;
      const auto& approx = over ? entry.over : entry.under;
      if (!approx) throw DomainMismatch("emit_para: missing " + std::string(over ? "over" : "under") +
                                        "estimator for constraint " + std::to_string(j));
      if (approx->side != (over ? Side::Over : Side::Under)) throw DomainMismatch("emit_para: wrong side");
      check_match(u, approx->function, approx->domain, static_cast<int>(j));
      m.epsilon = std::max(m.epsilon, approx->epsilon);
      for (std::size_t k = 0; k < approx->pieces.size(); ++k) {
        m.rows.push_back(parabola_row(approx->pieces[k].parabola, u.x_index, u.y_index, over, static_cast<int>(j),
                                      static_cast<int>(k)));
      }
    }
  }
  return m;
}

RelaxedModel emit_pwl(const FactoredProblem& problem, const std::vector<PwlApproximation>& relaxations) {
  if (relaxations.size() != problem.univariate.size()) {
    throw DomainMismatch("emit_pwl: one relaxation per univariate constraint expected");
  }
  RelaxedModel m = omega_model(problem);
  m.technique = "pwl";
  for (std::size_t jj = 0; jj < relaxations.size(); ++jj) {
    const int j = static_cast<int>(jj);
    const auto& u = problem.univariate[jj];
    const auto& p = relaxations[jj];
    check_match(u, p.function, p.domain, j);
    const std::size_t K = p.size();
    if (K == 0) throw DomainMismatch("emit_pwl: empty relaxation for constraint " + std::to_string(j));
    const double tol = p.relaxation_tolerance();
    m.epsilon = std::max(m.epsilon, tol);

    PwlBlock block;
    block.constraint = j;
    block.x_var = u.x_index;
    block.breakpoints = p.breakpoints;
    const std::string tag = std::to_string(j) + "_";
    for (std::size_t k = 1; k < K; ++k) {
      block.u.push_back(static_cast<int>(m.variables.size()));
      m.variables.push_back({"_u" + tag + std::to_string(k), 0.0, 1.0, true});
    }
    for (std::size_t k = 1; k <= K; ++k) {
      block.delta.push_back(static_cast<int>(m.variables.size()));
      m.variables.push_back({"_d" + tag + std::to_string(k), 0.0, 1.0, false});
    }
    auto row = [&](Row r, const char* role, int piece) {
      r.name = "pwl" + tag + role + (piece >= 0 ? std::to_string(piece) : std::string());
      m.rows.push_back({std::move(r), Provenance{"pwl", role, j, piece}});
    };

    // x = t_0 + sum (t_k - t_{k-1}) delta_k
    Row x;
    x.linear.push_back({u.x_index, 1.0});
    for (std::size_t k = 1; k <= K; ++k) x.linear.push_back({block.delta[k - 1], -(p.breakpoints[k] - p.breakpoints[k - 1])});
    x.sense = Sense::Eq;
    x.rhs = p.breakpoints[0];
    row(x, "x", -1);

    // delta_{k+1} <= u_k <= delta_k, u_{k+1} <= u_k
    for (std::size_t k = 1; k < K; ++k) {
      Row a;
      a.linear = {{block.delta[k], 1.0}, {block.u[k - 1], -1.0}};
      row(a, "fill", static_cast<int>(2 * k - 1));
      Row b;
      b.linear = {{block.u[k - 1], 1.0}, {block.delta[k - 1], -1.0}};
      row(b, "fill", static_cast<int>(2 * k));
      if (k + 1 < K) {
        Row c;
        c.linear = {{block.u[k], 1.0}, {block.u[k - 1], -1.0}};
        row(c, "order", static_cast<int>(k));
      }
    }

    // w = f(t_0) - shift + sum (f(t_k) - f(t_{k-1})) delta_k, substituted
    const double w0 = p.values[0] - p.shift;
    auto w_terms = [&](double s) {
      std::vector<LinearTerm> t;
      for (std::size_t k = 1; k <= K; ++k) {
        const double d = p.values[k] - p.values[k - 1];
        if (d != 0.0) t.push_back({block.delta[k - 1], s * d});
      }
      return t;
    };
    if (wants_under(u.sense)) {  // w <= y
      Row r;
      r.linear = w_terms(1.0);
      r.linear.push_back({u.y_index, -1.0});
      r.rhs = -w0;
      row(r, "w_under", -1);
    }
    if (wants_over(u.sense)) {  // y <= w + tol
      Row r;
      r.linear = w_terms(-1.0);
      r.linear.push_back({u.y_index, 1.0});
      r.rhs = w0 + tol;
      row(r, "w_over", -1);
    }
    m.blocks.push_back(std::move(block));
  }
  return m;
}

std::vector<ParaRelaxation> para_relaxations(const FactoredProblem& problem, double eps, double lambda,
                                             LookupTable* lut, std::size_t verify_samples) {
  std::vector<ParaRelaxation> out;
  for (const auto& u : problem.univariate) {
    ParaRelaxation r;
    for (Side side : {Side::Under, Side::Over}) {
      if (side == Side::Under ? !wants_under(u.sense) : !wants_over(u.sense)) continue;
      ParaApproximation a;
      if (!(u.domain.length() > 0.0)) {
        // fixed variable: one flat parabola is exact
        a.function = u.function;
        a.domain = u.domain;
        a.epsilon = eps;
        a.side = side;
        a.lambda = lambda;
        a.pieces.push_back({Parabola{0.0, 0.0, evaluate(u.function, u.domain.lo)}, u.domain});
      } else if (lut && u.function == UnivariateFunction::of(u.function.kind)) {
        a = lookup_or_compute(*lut, u.function.kind, u.domain, eps, side, lambda, verify_samples);
      } else {
        a = approximate(u.function, u.domain, eps, side, lambda);
        const ViolationReport rep = verify(a, verify_samples);
        if (!rep.pass) throw Error(u.name + ": PARA approximation failed verification");
      }
      (side == Side::Under ? r.under : r.over) = std::move(a);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<PwlApproximation> pwl_relaxations(const FactoredProblem& problem, double eps,
                                              std::size_t verify_samples) {
  std::vector<PwlApproximation> out;
  for (const auto& u : problem.univariate) {
    PwlApproximation p = relax_shift(u.function, u.domain, eps);
    const PwlViolationReport rep = verify_relaxation(p, verify_samples);
    if (!rep.pass) throw Error(u.name + ": PWL relaxation failed verification");
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// lp-text and JSON

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_num(std::string_view s) {
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw FormatError("bad number '" + std::string(s) + "'");
  return v;
}

void write_term(std::ostream& os, double c, const std::string& body) {
  os << (std::signbit(c) ? " - " : " + ") << num(std::fabs(c)) << ' ' << body;
}

void write_row_terms(std::ostream& os, const RelaxedModel& m, const Row& r) {
  if (r.linear.empty() && r.quadratic.empty()) os << " 0";
  for (const auto& t : r.quadratic) {
    const auto& a = m.variables[t.i].name;
    write_term(os, t.coef, t.i == t.j ? a + "^2" : a + " * " + m.variables[t.j].name);
  }
  for (const auto& t : r.linear) write_term(os, t.coef, m.variables[t.var].name);
}

std::string join_names(const RelaxedModel& m, const std::vector<int>& idx) {
  std::string s;
  for (std::size_t k = 0; k < idx.size(); ++k) s += (k ? "," : "") + m.variables[idx[k]].name;
  return s.empty() ? "-" : s;
}

std::string write_lp(const RelaxedModel& m) {
  std::ostringstream os;
  os << "\\ relaxed model\n";
  os << "\\ technique: " << m.technique << "\n";
  os << "\\ epsilon: " << num(m.epsilon) << "\n";
  os << "OBJECTIVE\n minimize:";
  if (m.objective.empty()) os << " 0";
  for (const auto& t : m.objective) write_term(os, t.coef, m.variables[t.var].name);
  if (m.objective_constant != 0.0) {
    os << (std::signbit(m.objective_constant) ? " - " : " + ") << num(std::fabs(m.objective_constant));
  }
  os << "\nSUBJECT TO\n";
  for (const auto& mr : m.rows) {
    os << ' ' << mr.row.name << ':';
    write_row_terms(os, m, mr.row);
    os << ' ' << to_string(mr.row.sense) << ' ' << num(mr.row.rhs);
    const auto& p = mr.provenance;
    os << " \\ " << p.technique << ' ' << p.role << ' ' << p.constraint << ' ' << p.piece << "\n";
  }
  os << "BOUNDS\n";
  for (const auto& v : m.variables) os << ' ' << num(v.lb) << " <= " << v.name << " <= " << num(v.ub) << "\n";
  os << "GENERAL\n";
  for (const auto& v : m.variables) {
    if (v.integer) os << ' ' << v.name << "\n";
  }
  for (const auto& b : m.blocks) {
    os << "\\ block " << b.constraint << ' ' << m.variables[b.x_var].name << ' ' << join_names(m, b.u) << ' '
       << join_names(m, b.delta);
    for (double t : b.breakpoints) os << ' ' << num(t);
    os << "\n";
  }
  os << "END\n";
  return os.str();
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream is{std::string(s)};
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  if (s == "-") return out;
  std::size_t start = 0;
  for (;;) {
    std::size_t k = s.find(',', start);
    out.push_back(s.substr(start, k - start));
    if (k == std::string::npos) return out;
    start = k + 1;
  }
}

RelaxedModel read_lp(std::string_view text) {
  RelaxedModel m;
  std::vector<std::string> lines;
  {
    std::istringstream is{std::string(text)};
    std::string line;
    while (std::getline(is, line)) lines.push_back(line);
  }

  // Variables come from BOUNDS; read them first so rows can resolve names.
  std::map<std::string, int> index;
  std::string section;
  for (const auto& line : lines) {
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "OBJECTIVE" || tok[0] == "SUBJECT" || tok[0] == "BOUNDS" || tok[0] == "GENERAL" || tok[0] == "END") {
      section = tok[0];
      continue;
    }
    if (tok[0][0] == '\\') continue;
    if (section == "BOUNDS") {
      if (tok.size() != 5 || tok[1] != "<=" || tok[3] != "<=") throw FormatError("bad bounds line: " + line);
      index[tok[2]] = static_cast<int>(m.variables.size());
      m.variables.push_back({tok[2], parse_num(tok[0]), parse_num(tok[4]), false});
    }
  }
  auto var = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) throw FormatError("undeclared variable '" + name + "'");
    return it->second;
  };

  // [sign coef body]... up to the first token in `stop`
  auto terms = [&](const std::vector<std::string>& tok, std::size_t& k, Row& r, double& constant) {
    if (k < tok.size() && tok[k] == "0") {
      ++k;
      return;
    }
    while (k < tok.size() && (tok[k] == "+" || tok[k] == "-")) {
      const double sign = tok[k] == "-" ? -1.0 : 1.0;
      if (k + 1 >= tok.size()) throw FormatError("dangling sign");
      const double c = sign * parse_num(tok[k + 1]);
      k += 2;
      const bool has_body = k < tok.size() && tok[k] != "+" && tok[k] != "-" && tok[k] != "<=" && tok[k] != ">=" &&
                            tok[k] != "=" && tok[k][0] != '\\';
      if (!has_body) {
        constant += c;
        continue;
      }
      std::string body = tok[k++];
      if (body.size() > 2 && body.compare(body.size() - 2, 2, "^2") == 0) {
        int v = var(body.substr(0, body.size() - 2));
        r.quadratic.push_back({v, v, c});
      } else if (k + 1 < tok.size() && tok[k] == "*") {
        r.quadratic.push_back({var(body), var(tok[k + 1]), c});
        k += 2;
      } else {
        r.linear.push_back({var(body), c});
      }
    }
  };

  section.clear();
  for (const auto& line : lines) {
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "OBJECTIVE" || tok[0] == "SUBJECT" || tok[0] == "BOUNDS" || tok[0] == "GENERAL" || tok[0] == "END") {
      section = tok[0];
      continue;
    }
    if (tok[0] == "\\") {
      if (tok.size() >= 3 && tok[1] == "technique:") m.technique = tok[2];
      else if (tok.size() >= 3 && tok[1] == "epsilon:") m.epsilon = parse_num(tok[2]);
      else if (tok.size() >= 6 && tok[1] == "block") {
        PwlBlock b;
        b.constraint = std::stoi(tok[2]);
        b.x_var = var(tok[3]);
        for (const auto& n : split_commas(tok[4])) b.u.push_back(var(n));
        for (const auto& n : split_commas(tok[5])) b.delta.push_back(var(n));
        for (std::size_t k = 6; k < tok.size(); ++k) b.breakpoints.push_back(parse_num(tok[k]));
        m.blocks.push_back(std::move(b));
      }
      continue;
    }
    if (section == "OBJECTIVE") {
      if (tok[0] != "minimize:") throw FormatError("objective must start with 'minimize:'");
      Row r;
      std::size_t k = 1;
      terms(tok, k, r, m.objective_constant);
      if (!r.quadratic.empty() || k != tok.size()) throw FormatError("objective must be linear: " + line);
      m.objective = r.linear;
    } else if (section == "SUBJECT") {
      ModelRow mr;
      if (tok[0].back() != ':') throw FormatError("row without a name: " + line);
      mr.row.name = tok[0].substr(0, tok[0].size() - 1);
      std::size_t k = 1;
      double constant = 0.0;
      terms(tok, k, mr.row, constant);
      if (constant != 0.0 || k + 1 >= tok.size()) throw FormatError("malformed row: " + line);
      mr.row.sense = parse_sense(tok[k]);
      mr.row.rhs = parse_num(tok[k + 1]);
      k += 2;
      if (k < tok.size()) {
        if (tok[k] != "\\" || k + 4 >= tok.size()) throw FormatError("malformed row annotation: " + line);
        mr.provenance = {tok[k + 1], tok[k + 2], std::stoi(tok[k + 3]), std::stoi(tok[k + 4])};
      }
      m.rows.push_back(std::move(mr));
    } else if (section == "GENERAL") {
      m.variables[var(tok[0])].integer = true;
    }
  }
  return m;
}

nlohmann::json bound_json(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(num(v)); }

double bound_from(const nlohmann::json& j) { return j.is_string() ? parse_num(j.get<std::string>()) : j.get<double>(); }

std::string write_json(const RelaxedModel& m) {
  using nlohmann::json;
  json vars = json::array();
  for (const auto& v : m.variables) {
    vars.push_back({{"name", v.name}, {"lb", bound_json(v.lb)}, {"ub", bound_json(v.ub)}, {"integer", v.integer}});
  }
  json obj = json::array();
  for (const auto& t : m.objective) obj.push_back({t.var, t.coef});
  json rows = json::array();
  for (const auto& mr : m.rows) {
    json lin = json::array(), quad = json::array();
    for (const auto& t : mr.row.linear) lin.push_back({t.var, t.coef});
    for (const auto& t : mr.row.quadratic) quad.push_back({t.i, t.j, t.coef});
    rows.push_back({{"name", mr.row.name},
                    {"linear", lin},
                    {"quadratic", quad},
                    {"sense", std::string(to_string(mr.row.sense))},
                    {"rhs", mr.row.rhs},
                    {"provenance",
                     {{"technique", mr.provenance.technique},
                      {"role", mr.provenance.role},
                      {"constraint", mr.provenance.constraint},
                      {"piece", mr.provenance.piece}}}});
  }
  json blocks = json::array();
  for (const auto& b : m.blocks) {
    blocks.push_back({{"constraint", b.constraint},
                      {"x", b.x_var},
                      {"u", b.u},
                      {"delta", b.delta},
                      {"breakpoints", b.breakpoints}});
  }
  json j{{"technique", m.technique},
         {"epsilon", m.epsilon},
         {"variables", vars},
         {"objective", {{"linear", obj}, {"constant", m.objective_constant}}},
         {"rows", rows},
         {"blocks", blocks}};
  return j.dump(1) + "\n";
}

RelaxedModel read_json(std::string_view text) {
  RelaxedModel m;
  try {
    auto j = nlohmann::json::parse(text);
    m.technique = j.at("technique").get<std::string>();
    m.epsilon = j.at("epsilon").get<double>();
    for (const auto& v : j.at("variables")) {
      m.variables.push_back({v.at("name").get<std::string>(), bound_from(v.at("lb")), bound_from(v.at("ub")),
                             v.at("integer").get<bool>()});
    }
    for (const auto& t : j.at("objective").at("linear")) m.objective.push_back({t[0].get<int>(), t[1].get<double>()});
    m.objective_constant = j.at("objective").at("constant").get<double>();
    for (const auto& r : j.at("rows")) {
      ModelRow mr;
      mr.row.name = r.at("name").get<std::string>();
      for (const auto& t : r.at("linear")) mr.row.linear.push_back({t[0].get<int>(), t[1].get<double>()});
      for (const auto& t : r.at("quadratic")) {
        mr.row.quadratic.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<double>()});
      }
      mr.row.sense = parse_sense(r.at("sense").get<std::string>());
      mr.row.rhs = r.at("rhs").get<double>();
      const auto& p = r.at("provenance");
      mr.provenance = {p.at("technique").get<std::string>(), p.at("role").get<std::string>(),
                       p.at("constraint").get<int>(), p.at("piece").get<int>()};
      m.rows.push_back(std::move(mr));
    }
    for (const auto& b : j.at("blocks")) {
      m.blocks.push_back({b.at("constraint").get<int>(), b.at("x").get<int>(), b.at("u").get<std::vector<int>>(),
                          b.at("delta").get<std::vector<int>>(), b.at("breakpoints").get<std::vector<double>>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model JSON: ") + e.what());
  }
  return m;
}

}  // namespace

std::string write_model(const RelaxedModel& model, ModelFormat format) {
  return format == ModelFormat::LpText ? write_lp(model) : write_json(model);
}

RelaxedModel read_model(std::string_view text, ModelFormat format) {
  return format == ModelFormat::LpText ? read_lp(text) : read_json(text);
}

// ---------------------------------------------------------------------------
// Brute-force sandwich check

void complete_blocks(const RelaxedModel& model, std::vector<double>& x) {
  for (const auto& b : model.blocks) {
    const auto& t = b.breakpoints;
    const std::size_t K = t.size() - 1;
    const double xv = x[b.x_var];
    std::size_t piece = K;  // 1-based index of the piece containing xv
    for (std::size_t k = 1; k <= K; ++k) {
      if (xv <= t[k]) {
        piece = k;
        break;
      }
    }
    for (std::size_t k = 1; k <= K; ++k) {
      double d = k < piece ? 1.0 : k > piece ? 0.0 : (xv - t[k - 1]) / (t[k] - t[k - 1]);
      x[b.delta[k - 1]] = std::clamp(d, 0.0, 1.0);
    }
    for (std::size_t k = 1; k < K; ++k) x[b.u[k - 1]] = k < piece ? 1.0 : 0.0;
  }
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRowTol = 1e-9;

enum class Mode { Original = 0, Relaxed = 1, Approximate = 2 };

class Checker {
 public:
  Checker(const RelaxedModel& m, const FactoredProblem& p) : m_(m), p_(p) {
    if (m.variables.size() < p.variables.size()) throw DomainMismatch("model has fewer variables than the problem");
    for (std::size_t i = 0; i < p.variables.size(); ++i) {
      if (m.variables[i].name != p.variables[i].name) throw DomainMismatch("model variables do not extend the problem");
    }
    band_rows_.resize(p.univariate.size());
    block_of_.assign(p.univariate.size(), -1);
    for (const auto& mr : m.rows) {
      const int j = mr.provenance.constraint;
      if (j < 0 || static_cast<std::size_t>(j) >= p.univariate.size()) continue;
      const int y = p.univariate[j].y_index;
      for (const auto& t : mr.row.linear) {
        if (t.var == y && t.coef != 0.0) band_rows_[j].push_back({&mr.row, t.coef});
      }
    }
    for (std::size_t b = 0; b < m.blocks.size(); ++b) {
      const int j = m.blocks[b].constraint;
      if (j >= 0 && static_cast<std::size_t>(j) < block_of_.size()) block_of_[j] = static_cast<int>(b);
    }
    choose_eliminated();
  }

  int eliminated() const { return e_; }

  void evaluate_point(std::vector<double>& x) {
    for (Mode mode : {Mode::Original, Mode::Relaxed, Mode::Approximate}) enumerate(mode, 0, x);
  }

  double best(Mode mode) const { return best_[static_cast<int>(mode)]; }
  double epsilon() const { return m_.epsilon; }

 private:
  struct BandRow {
    const Row* row;
    double coef;
  };

  static double coef_of(const Row& r, int v) {
    double c = 0.0;
    for (const auto& t : r.linear) {
      if (t.var == v) c += t.coef;
    }
    return c;
  }

  static bool in_quadratic(const Row& r, int v) {
    return std::any_of(r.quadratic.begin(), r.quadratic.end(), [v](const QuadTerm& t) { return t.i == v || t.j == v; });
  }

  static bool mentions(const QuadExpr& e, int v) {
    if (e.linear.count(v)) return true;
    return std::any_of(e.quadratic.begin(), e.quadratic.end(),
                       [v](const auto& kv) { return kv.first.first == v || kv.first.second == v; });
  }

  void choose_eliminated() {
    for (const auto& t : p_.objective) {
      const int v = t.var;
      if (t.coef == 0.0 || static_cast<std::size_t>(v) >= p_.original_variables || p_.variables[v].integer) continue;
      bool ok = true;
      for (const auto& r : p_.omega) ok = ok && !in_quadratic(r, v);
      for (const auto& mr : m_.rows) ok = ok && !in_quadratic(mr.row, v);
      for (const auto& a : p_.auxiliaries) ok = ok && !mentions(a.numerator, v) && !mentions(a.denominator, v);
      for (const auto& u : p_.univariate) ok = ok && u.x_index != v;
      if (ok) {
        e_ = v;
        for (const auto& o : p_.objective) {
          if (o.var == v) ce_ += o.coef;
        }
        return;
      }
    }
  }

  // Smallest and largest y_j allowed by the relaxation rows of constraint j.
  std::pair<double, double> band(int j, std::vector<double>& x) {
    if (block_of_[j] >= 0) {
      RelaxedModel one;
      one.blocks.push_back(m_.blocks[block_of_[j]]);
      complete_blocks(one, x);
    }
    const int y = p_.univariate[j].y_index;
    const double saved = x[y];
    x[y] = 0.0;
    double lo = m_.variables[y].lb, hi = m_.variables[y].ub;
    for (const auto& br : band_rows_[j]) {
      const double bound = (br.row->rhs - br.row->activity(x)) / br.coef;
      const bool upper = (br.row->sense == Sense::Le) == (br.coef > 0.0);
      if (br.row->sense == Sense::Eq || upper) hi = std::min(hi, bound);
      if (br.row->sense == Sense::Eq || !upper) lo = std::max(lo, bound);
    }
    x[y] = saved;
    return {lo, hi};
  }

  static void add_interior(std::vector<double>& c, double lo, double hi) {
    constexpr int n = 15;
    for (int k = 1; k <= n; ++k) c.push_back(lo + (hi - lo) * k / (n + 1));
  }

  void enumerate(Mode mode, std::size_t a, std::vector<double>& x) {
    if (a == p_.auxiliaries.size()) return finish(mode, x);
    const auto& aux = p_.auxiliaries[a];
    switch (aux.kind) {
      case AuxDefinition::Kind::Polynomial:
        x[aux.var] = aux.numerator.evaluate(x);
        return enumerate(mode, a + 1, x);
      case AuxDefinition::Kind::Quotient:
        x[aux.var] = aux.numerator.evaluate(x) / aux.denominator.evaluate(x);
        return enumerate(mode, a + 1, x);
      case AuxDefinition::Kind::Univariate: break;
    }
    const int j = aux.constraint;
    const auto& u = p_.univariate[j];
    const double fv = pararelax::evaluate(u.function, x[u.x_index]);
    const double lb = p_.variables[aux.var].lb, ub = p_.variables[aux.var].ub;
    const double eps = m_.epsilon;
    const double tol = kRowTol * (1.0 + std::fabs(fv));
    std::vector<double> cand;

    if (mode == Mode::Original) {
      cand.push_back(fv);
    } else {
      auto [lo, hi] = band(j, x);
      std::vector<double> rel;
      if (lo <= hi + tol) {
        hi = std::max(lo, hi);
        if (u.sense == Sense::Le) rel.push_back(lo);
        else if (u.sense == Sense::Ge) rel.push_back(hi);
        else {
          rel = {lo, hi};
          if (fv >= lo && fv <= hi) rel.push_back(fv);
          add_interior(rel, lo, hi);
        }
      }
      if (mode == Mode::Relaxed) {
        cand = rel;
      } else {
        // (P_eps): |y - f| within eps in the constrained direction(s)
        const double elo = std::max(fv - eps, lb), ehi = std::min(fv + eps, ub);
        if (u.sense == Sense::Le) cand.push_back(elo);
        else if (u.sense == Sense::Ge) cand.push_back(ehi);
        else {
          cand = {elo, ehi, std::clamp(fv, elo, ehi)};
          add_interior(cand, elo, ehi);
          for (double r : rel) {
            if (r >= fv - eps - tol && r <= fv + eps + tol) cand.push_back(r);
          }
        }
      }
    }
    const double saved = x[aux.var];
    for (double c : cand) {
      x[aux.var] = c;
      enumerate(mode, a + 1, x);
    }
    x[aux.var] = saved;
  }

  void finish(Mode mode, std::vector<double>& x) {
    double lo = -kInf, hi = kInf;
    if (e_ >= 0) {
      lo = p_.variables[e_].lb;
      hi = p_.variables[e_].ub;
      x[e_] = 0.0;
    }
    auto apply = [&](const Row& r) {
      const double c = e_ >= 0 ? coef_of(r, e_) : 0.0;
      if (c == 0.0) return r.satisfied(x, kRowTol);
      const double bound = (r.rhs - r.activity(x)) / c;
      const double slack = kRowTol * (1.0 + std::fabs(r.rhs)) / std::fabs(c);
      const bool upper = (r.sense == Sense::Le) == (c > 0.0);
      if (r.sense == Sense::Eq || upper) hi = std::min(hi, bound + slack);
      if (r.sense == Sense::Eq || !upper) lo = std::max(lo, bound - slack);
      return true;
    };
    if (mode == Mode::Relaxed) {
      for (const auto& mr : m_.rows) {
        if (!apply(mr.row)) return;
      }
    } else {
      for (const auto& r : p_.omega) {
        if (!apply(r)) return;
      }
    }
    if (e_ >= 0) {
      if (lo > hi) return;
      x[e_] = ce_ > 0.0 ? lo : hi;
    }
    double& b = best_[static_cast<int>(mode)];
    b = std::min(b, p_.objective_value(x));
  }

  const RelaxedModel& m_;
  const FactoredProblem& p_;
  std::vector<std::vector<BandRow>> band_rows_;
  std::vector<int> block_of_;
  int e_ = -1;
  double ce_ = 0.0;
  double best_[3] = {kInf, kInf, kInf};
};

}  // namespace

CheckReport brute_force_check(const RelaxedModel& model, const FactoredProblem& original, std::size_t grid) {
  Checker checker(model, original);
  const int e = checker.eliminated();

  std::vector<int> continuous, integer;
  for (std::size_t i = 0; i < original.original_variables; ++i) {
    if (static_cast<int>(i) == e) continue;
    const auto& v = original.variables[i];
    if (v.integer) {
      const double count = std::floor(v.ub) - std::ceil(v.lb) + 1.0;
      if (count > 8) throw DimensionTooLarge("integer variable '" + v.name + "' has more than 8 values");
      if (count < 1) throw DomainError("integer variable '" + v.name + "' has no integral value");
      integer.push_back(static_cast<int>(i));
    } else if (v.lb < v.ub) {
      continuous.push_back(static_cast<int>(i));
    }
  }
  if (continuous.size() > 2) {
    throw DimensionTooLarge("brute_force_check grids at most two continuous variables, got " +
                            std::to_string(continuous.size()));
  }

  const std::size_t per_dim = continuous.empty()    ? 1
                              : continuous.size() == 1 ? std::max<std::size_t>(grid, 2)
                                                       : std::max<std::size_t>(
                                                             static_cast<std::size_t>(std::sqrt(static_cast<double>(grid))), 2);

  // axis values per gridded variable
  std::vector<int> dims;
  std::vector<std::vector<double>> axis;
  for (int v : continuous) {
    const auto& var = original.variables[v];
    std::vector<double> a(per_dim);
    for (std::size_t k = 0; k < per_dim; ++k) {
      a[k] = k + 1 == per_dim ? var.ub : var.lb + (var.ub - var.lb) * static_cast<double>(k) / (per_dim - 1);
    }
    dims.push_back(v);
    axis.push_back(std::move(a));
  }
  for (int v : integer) {
    const auto& var = original.variables[v];
    std::vector<double> a;
    for (double z = std::ceil(var.lb); z <= std::floor(var.ub); z += 1.0) a.push_back(z);
    dims.push_back(v);
    axis.push_back(std::move(a));
  }

  CheckReport rep;
  rep.epsilon = model.epsilon;
  rep.eliminated = e >= 0 ? original.variables[e].name : "";
  if (e < 0) {
    for (const auto& t : original.objective) {
      auto it = std::find(continuous.begin(), continuous.end(), t.var);
      if (it == continuous.end()) continue;
      const auto& var = original.variables[t.var];
      rep.slack += std::fabs(t.coef) * (var.ub - var.lb) / static_cast<double>(per_dim - 1);
    }
  }

  std::vector<double> x(model.variables.size(), 0.0);
  for (std::size_t i = 0; i < original.original_variables; ++i) {
    const auto& v = original.variables[i];
    x[i] = v.integer ? std::ceil(v.lb) : v.lb;
  }
  std::vector<std::size_t> at(dims.size(), 0);
  for (;;) {
    for (std::size_t d = 0; d < dims.size(); ++d) x[dims[d]] = axis[d][at[d]];
    checker.evaluate_point(x);
    ++rep.points;
    std::size_t d = 0;
    for (; d < dims.size(); ++d) {
      if (++at[d] < axis[d].size()) break;
      at[d] = 0;
    }
    if (d == dims.size()) break;
  }

  rep.original = checker.best(Mode::Original);
  rep.relaxed = checker.best(Mode::Relaxed);
  rep.approximate = checker.best(Mode::Approximate);
  const double tol = 1e-9 * (1.0 + std::fabs(std::isfinite(rep.original) ? rep.original : 0.0));
  rep.relaxed_below_original = rep.relaxed <= rep.original + tol;
  rep.approximate_below_relaxed = rep.approximate <= rep.relaxed + tol;
  rep.original_within_eps =
      std::isinf(rep.original) ? std::isinf(rep.relaxed) : rep.original <= rep.relaxed + rep.epsilon + rep.slack + tol;
  rep.pass = rep.relaxed_below_original && rep.approximate_below_relaxed && rep.original_within_eps;
  return rep;
}

}  // namespace pararelax
