// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace ecoop {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct LinearTerm {
  std::size_t var;
  double coeff;
};

/// Sparse coefficient row. Repeated variable indices are summed.
struct LpRow {
  std::vector<LinearTerm> terms;
  double rhs = 0.0;
  std::string label;
};

/// minimize objective . x
///   subject to  eq rows:  row . x == rhs
///               ub rows:  row . x <= rhs
///               lower <= x <= upper
struct LpProblem {
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::string> labels;
  std::vector<LpRow> eq_constraints;
  std::vector<LpRow> ub_constraints;

  std::size_t num_vars() const { return objective.size(); }

  std::size_t add_variable(std::string label, double cost = 0.0, double lo = 0.0,
                           double hi = kInf);
  void add_eq(std::vector<LinearTerm> terms, double rhs, std::string label = {});
  void add_ub(std::vector<LinearTerm> terms, double rhs, std::string label = {});

  /// Throws ValidationError for out-of-range indices, lower > upper,
  /// NaN data or a -inf upper / +inf lower bound.
  void validate() const;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

std::string to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;
  double objective_value = 0.0;
  std::size_t iterations = 0;
};

struct LpOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  /// Consecutive degenerate pivots after which Bland's rule takes over.
  std::size_t degenerate_limit = 1000;
  /// 0 selects a size-dependent limit.
  std::size_t max_iterations = 0;
};

/// Bounded-variable primal simplex (two phases, explicit dense basis
/// inverse). Deterministic for identical input. Throws SolverError when
/// the final point cannot be certified feasible.
LpSolution lp_solve(const LpProblem& problem, const LpOptions& options = {});

double row_activity(const LpRow& row, const std::vector<double>& x);

/// Largest constraint or bound violation of x (0 when x is feasible).
double max_violation(const LpProblem& problem, const std::vector<double>& x);

/// One line per constraint: `<label>: <coeffs> (<=|=) <rhs>`, followed by
/// the variable bounds.
void dump_problem(const LpProblem& problem, std::ostream& os);

}  // namespace ecoop
