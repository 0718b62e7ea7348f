#pragma once

// Dense convex QP with a separable quadratic objective, solved by exhaustive search over
// working sets of the KKT conditions.
//
//   minimize    sum_i quad[i] * x_i^2 + lin[i] * x_i + constant
//   subject to  eq * x == eq_rhs
//               ineq * x <= ineq_rhs
//
// quad[i] >= 0 (linear terms allowed). The feasible region must be bounded. An optimum
// of such a program always exists at a point where the equality rows plus some set of
// active inequality rows give a nonsingular KKT system; the solver visits every such
// candidate and keeps the cheapest primal-feasible one, so no multiplier signs are
// inspected and degenerate vertices are harmless. Inequality rows that share a group
// (e.g. the upper and lower bound of one variable) are never active together.
//
// Cost grows combinatorially with the number of variables; intended for dispatch
// problems with a handful of generators.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace powerroute {

struct SeparableQp {
    Eigen::VectorXd quad;
    Eigen::VectorXd lin;
    double constant = 0.0;
    Eigen::MatrixXd eq;
    Eigen::VectorXd eq_rhs;
    Eigen::MatrixXd ineq;
    Eigen::VectorXd ineq_rhs;
    /// Group label per inequality row.
    std::vector<std::size_t> ineq_group;

    double objective(const Eigen::VectorXd& x) const;
};

struct QpSolution {
    bool feasible = false;
    Eigen::VectorXd x;
    double objective = 0.0;
    std::vector<std::size_t> working_set;  // inequality rows held at equality
};

inline constexpr double kQpFeasibilityTolerance = 1e-7;
inline constexpr std::size_t kDefaultWorkingSetBudget = 2'000'000;

/// Throws SolverLimit if more than `budget` working sets would need to be examined.
QpSolution solve_qp(const SeparableQp& problem, std::size_t budget = kDefaultWorkingSetBudget);

}  // namespace powerroute
