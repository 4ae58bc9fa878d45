#pragma once

// Relaxed models: the linear/quadratic rows of a factored problem plus, per
// univariate constraint, either K quadratic rows (PARA) or an incremental
// PWL block with K continuous fill variables and K - 1 binaries.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pararelax/expr.hpp"
#include "pararelax/lut.hpp"
#include "pararelax/para.hpp"
#include "pararelax/pwl.hpp"

namespace pararelax {

/// Where a row came from. technique is "omega", "para" or "pwl"; role is
/// "row" for copied rows, "under"/"over" for parabolas, "x", "fill",
/// "order", "w_under", "w_over" inside a PWL block.
struct Provenance {
  std::string technique = "omega";
  std::string role = "row";
  int constraint = -1;  // index of the univariate constraint, -1 for omega rows
  int piece = -1;

  bool operator==(const Provenance&) const = default;
};

struct ModelRow {
  Row row;
  Provenance provenance;

  bool operator==(const ModelRow&) const = default;
};

/// Variables of one incremental PWL block, for completing assignments.
struct PwlBlock {
  int constraint = -1;
  int x_var = -1;
  std::vector<int> u;      // K - 1 binaries
  std::vector<int> delta;  // K fill variables in [0, 1]
  std::vector<double> breakpoints;

  bool operator==(const PwlBlock&) const = default;
};

struct RelaxedModel {
  std::string technique = "omega";
  double epsilon = 0.0;
  std::vector<Variable> variables;
  std::vector<LinearTerm> objective;
  double objective_constant = 0.0;
  std::vector<ModelRow> rows;
  std::vector<PwlBlock> blocks;

  bool operator==(const RelaxedModel&) const = default;

  std::size_t quadratic_rows() const;
  std::size_t linear_rows() const { return rows.size() - quadratic_rows(); }
  std::size_t integer_variables() const;
  int find_variable(std::string_view name) const;
};

/// Omega alone: variables, rows and objective of the factored problem.
RelaxedModel omega_model(const FactoredProblem& problem);

/// Per univariate constraint: `under` serves f <= y, `over` serves f >= y.
struct ParaRelaxation {
  std::optional<ParaApproximation> under;
  std::optional<ParaApproximation> over;
};

RelaxedModel emit_para(const FactoredProblem& problem, const std::vector<ParaRelaxation>& approximations);

/// Each entry must be a shifted relaxation (relax_shift). Equalities share
/// one block: w <= y and y <= w + tolerance.
RelaxedModel emit_pwl(const FactoredProblem& problem, const std::vector<PwlApproximation>& relaxations);

/// Approximations for every univariate constraint, verified. Plain
/// elementary functions go through `lut` when given.
std::vector<ParaRelaxation> para_relaxations(const FactoredProblem& problem, double eps, double lambda = 0.9,
                                             LookupTable* lut = nullptr, std::size_t verify_samples = 20'000);
std::vector<PwlApproximation> pwl_relaxations(const FactoredProblem& problem, double eps,
                                              std::size_t verify_samples = 20'000);

enum class ModelFormat { LpText, Json };

std::string write_model(const RelaxedModel& model, ModelFormat format);
RelaxedModel read_model(std::string_view text, ModelFormat format);

/// Fills the u/delta variables of every block from the x values already in
/// `x` (delta pattern 1..1, theta, 0..0).
void complete_blocks(const RelaxedModel& model, std::vector<double>& x);

struct CheckReport {
  double original = 0.0;     // grid optimum of the factored problem
  double relaxed = 0.0;      // grid optimum of the relaxed model
  double approximate = 0.0;  // grid optimum with every f_j relaxed by eps
  double epsilon = 0.0;
  double slack = 0.0;        // objective change across one grid cell (0 when eliminated)
  std::size_t points = 0;
  std::string eliminated;    // objective variable solved exactly instead of gridded
  bool relaxed_below_original = false;
  bool approximate_below_relaxed = false;
  bool original_within_eps = false;
  bool pass = false;
};

/// Grid enumeration of (P), (P_rel) and (P_eps) over the user's variables.
/// One continuous objective variable that enters every row linearly is
/// optimized exactly; at most two further continuous variables are gridded,
/// integers are enumerated (at most 8 values each).
CheckReport brute_force_check(const RelaxedModel& model, const FactoredProblem& original, std::size_t grid = 10'000);

}  // namespace pararelax
