#pragma once

#include "stochq/types.hpp"

namespace stochq::lp {

// Feasibility problem over x >= 0:
//   less_equal.A x <= less_equal.b
//   equal.A      x  = equal.b
struct ConstraintBlock {
  RealMatrix A;
  RealVector b;
};

struct FeasibilityProblem {
  Eigen::Index variables = 0;
  ConstraintBlock less_equal;
  ConstraintBlock equal;
};

enum class LpStatus { feasible, infeasible, iteration_limit };

struct LpResult {
  LpStatus status = LpStatus::iteration_limit;
  RealVector x;                 // valid when feasible
  double phase1_objective = 0;  // minimum total artificial infeasibility reached
  long pivots = 0;
};

struct SimplexOptions {
  long max_pivots = 1'000'000;
  double pivot_tolerance = 1e-9;
  double cost_tolerance = 1e-12;
  double feasibility_tolerance = 1e-11;  // on the phase-1 optimum
};

// Phase-1 primal simplex on a dense tableau with Bland's anti-cycling rule.
// All state is local to the call.
LpResult solve_feasibility(const FeasibilityProblem& problem, const SimplexOptions& options = {});

}  // namespace stochq::lp
