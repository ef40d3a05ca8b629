#pragma once

#include <limits>
#include <string_view>
#include <vector>

#include "poalab/index_set.hpp"

namespace poalab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Links an LP row back to the game-theoretic object that produced it.
struct RowTag {
  enum class Kind { kPlain, kTriplet, kCeiling };
  Kind kind = Kind::kPlain;
  int basis = -1;
  Triplet triplet{};
};

struct LpRow {
  std::vector<double> coef;
  double rhs = 0.0;
  RowTag tag{};
};

// maximize objective . v  subject to  row.coef . v >= row.rhs  and bounds.
struct LinearProgram {
  int num_vars = 0;
  std::vector<double> objective;
  std::vector<LpRow> rows;
  std::vector<double> lower_bounds;
  std::vector<double> upper_bounds;

  explicit LinearProgram(int vars = 0)
      : num_vars(vars),
        objective(static_cast<std::size_t>(vars), 0.0),
        lower_bounds(static_cast<std::size_t>(vars), -kInf),
        upper_bounds(static_cast<std::size_t>(vars), kInf) {}

  void add_row(std::vector<double> coef, double rhs, RowTag tag = {}) {
    rows.push_back({std::move(coef), rhs, tag});
  }
};

struct SolverTolerances {
  double feas_tol = 1e-9;
  double activity_tol = 1e-7;
  int iteration_factor = 50;
};

enum class LpStatus { kOptimal, kUnbounded, kInfeasible };

std::string_view to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> values;
  double objective_value = 0.0;
  std::vector<int> active_rows;  // ascending
  int iterations = 0;
};

// Residual of a row at v, divided by max(1, |rhs|, max |coef|). Nonnegative
// means satisfied; activity and feasibility tests are made on this quantity.
double normalized_residual(const LpRow& row, const std::vector<double>& v);

// Dense two-phase simplex. Throws ValidationError on malformed input and
// SolverError when the iteration cap is hit or the recovered point fails
// the feasibility check.
LpSolution solve(const LinearProgram& lp, const SolverTolerances& tol = {});

// Two-variable specialization for (nu, rho) programs: variable 1 is maximized
// and every row has a nonpositive rho coefficient. Works on the lower
// envelope of the lines rho <= slope * nu + intercept and returns the
// leftmost optimal nu.
LpSolution solve_two_var_geometric(const LinearProgram& lp,
                                   const SolverTolerances& tol = {});

}  // namespace poalab
