#pragma once

#include <vector>

namespace boxcast {

struct SparseColumn {
  std::vector<int> rows;
  std::vector<double> values;
};

// min cost.x  s.t.  A x = rhs, x >= 0
struct LpProblem {
  int num_rows = 0;
  std::vector<double> rhs;
  std::vector<SparseColumn> columns;
  std::vector<double> cost;
  // Optional starting basis (one column per row). When it is primal
  // feasible, phase 1 is skipped.
  std::vector<int> start_basis;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-10;
  double pivot_tol = 1e-9;
  int max_iterations = 200000;
  int refactor_every = 50;
  // Consecutive degenerate pivots before falling back to Bland's rule.
  int degenerate_streak = 25;
  // Partial pricing: scan this many columns per chunk (0 = full pricing).
  int pricing_chunk = 0;
};

struct LpSolution {
  LpStatus status = LpStatus::iteration_limit;
  std::vector<double> x;
  std::vector<double> duals;  // y with reduced costs cost - A^T y
  double objective = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;  // max |A x - rhs|
};

// Two-phase revised simplex. Dantzig pricing, switching to Bland's rule
// during degenerate stretches so the method cannot cycle.
LpSolution solve_lp(const LpProblem& lp, const LpOptions& opt = {});

}  // namespace boxcast
