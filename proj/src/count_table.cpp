#include "pararelax/count_table.hpp"

#include <chrono>
#include <cstdio>
#include <numbers>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pararelax/errors.hpp"

namespace pararelax {

std::vector<TableDomain> table_domains(FunctionKind kind) {
  constexpr double pi = std::numbers::pi;
  switch (kind) {
    case FunctionKind::Sin:
      return {{"-pi/2:pi/2", {-pi / 2, pi / 2}}, {"pi/2:3pi/2", {pi / 2, 3 * pi / 2}},
              {"-pi/2:3pi/2", {-pi / 2, 3 * pi / 2}}, {"0:pi", {0.0, pi}},
              {"pi:2pi", {pi, 2 * pi}},               {"0:2pi", {0.0, 2 * pi}}};
    case FunctionKind::Exp:
      return {{"-5:-2", {-5, -2}}, {"-2:2", {-2, 2}}, {"-5:2", {-5, 2}},
              {"2:5", {2, 5}},     {"-2:5", {-2, 5}}, {"-5:5", {-5, 5}}};
    default: throw DomainError("no benchmark domains for " + std::string(to_string(kind)));
  }
}

std::string side_label(Side side) { return side == Side::Over ? "above" : "below"; }

namespace {

void run_cell(CountCell& cell, double lambda, std::size_t samples, Execution verify_exec) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    ParaApproximation a = approximate(UnivariateFunction::of(cell.kind), cell.domain, cell.epsilon, cell.side, lambda);
    ViolationReport rep = verify(a, samples, verify_exec);
    cell.pieces = a.size();
    cell.verified = rep.pass;
    cell.worst = rep.worst();
  } catch (const std::exception& e) {
    cell.error = e.what();
    cell.verified = false;
  }
  cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::vector<CountCell> count_table(FunctionKind kind, const CountTableOptions& options, Execution exec) {
  std::vector<CountCell> cells;
  for (const auto& d : table_domains(kind)) {
    for (Side side : {Side::Over, Side::Under}) {
      for (double eps : options.epsilons) {
        CountCell c;
        c.kind = kind;
        c.label = d.label;
        c.domain = d.domain;
        c.epsilon = eps;
        c.side = side;
        cells.push_back(c);
      }
    }
  }
  const long n = static_cast<long>(cells.size());
  if (exec == Execution::Serial || options.jobs <= 1) {
    for (long i = 0; i < n; ++i) run_cell(cells[i], options.lambda, options.samples, exec);
    return cells;
  }
  // cells run concurrently; each verification stays on its own thread
#pragma omp parallel for schedule(dynamic, 1) num_threads(options.jobs)
  for (long i = 0; i < n; ++i) run_cell(cells[i], options.lambda, options.samples, Execution::Serial);
  return cells;
}

std::string to_csv(const std::vector<CountCell>& cells) {
  std::ostringstream os;
  os << "kind,domain,lo,hi,side,epsilon,pieces,verify,worst,error\n";
  char buf[64];
  for (const auto& c : cells) {
    os << to_string(c.kind) << ',' << c.label << ',';
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,", c.domain.lo, c.domain.hi);
    os << buf << side_label(c.side) << ',';
    std::snprintf(buf, sizeof buf, "%g,", c.epsilon);
    os << buf << c.pieces << ',' << (c.verified ? "PASS" : "FAIL") << ',';
    std::snprintf(buf, sizeof buf, "%.3e,", c.worst);
    os << buf;
    std::string err = c.error;
    for (char& ch : err) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    os << err << '\n';
  }
  return os.str();
}

}  // namespace pararelax
