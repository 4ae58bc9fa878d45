#pragma once

// Piece counts of PARA approximations over a fixed grid of domains,
// tolerances and sides, each cell verified by dense sampling.

#include <cstddef>
#include <string>
#include <vector>

#include "pararelax/functions.hpp"
#include "pararelax/para.hpp"

namespace pararelax {

struct TableDomain {
  std::string label;  // e.g. "-pi/2:3pi/2", parseable by parse_constant on each side
  Interval domain;
};

/// The six benchmark domains for sin or exp.
std::vector<TableDomain> table_domains(FunctionKind kind);

inline const std::vector<double> kTableEpsilons = {1.0, 0.1, 0.01, 0.001};

struct CountCell {
  FunctionKind kind = FunctionKind::Sin;
  std::string label;
  Interval domain;
  double epsilon = 0.0;
  Side side = Side::Under;
  std::size_t pieces = 0;
  bool verified = false;
  double worst = 0.0;  // worst normalized violation found by verify
  std::string error;   // set when the cell threw
  double seconds = 0.0;
};

struct CountTableOptions {
  std::vector<double> epsilons = kTableEpsilons;
  double lambda = 0.9;
  std::size_t samples = 100'000;
  int jobs = 1;  // cells computed concurrently (Parallel only)
};

/// Cells ordered by domain, then side (above before below), then epsilon.
/// A failing cell records its error and the run continues.
std::vector<CountCell> count_table(FunctionKind kind, const CountTableOptions& options,
                                   Execution exec = Execution::Parallel);

/// kind,domain,lo,hi,side,epsilon,pieces,verify,worst,error
std::string to_csv(const std::vector<CountCell>& cells);

/// "above" for Side::Over, "below" for Side::Under.
std::string side_label(Side side);

}  // namespace pararelax
