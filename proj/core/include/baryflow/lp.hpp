#pragma once

#include <cstddef>

#include <Eigen/Core>

namespace baryflow {

/// min cost.x  s.t.  constraints * x = rhs,  x >= 0.
struct LpProblem {
  Eigen::VectorXd cost;
  Eigen::MatrixXd constraints;
  Eigen::VectorXd rhs;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;
  double value = 0.0;
  /// One dual per constraint row; rows found to be redundant get dual 0.
  Eigen::VectorXd duals;
  std::size_t iterations = 0;
};

struct SimplexOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  /// Pricing switches from most-negative reduced cost to Bland's rule after
  /// this many iterations per phase; 0 means 3 * (rows + columns).
  std::size_t bland_after = 0;
  /// Hard iteration cap per phase; 0 means 50 * (rows + columns) + 1000.
  std::size_t max_iterations = 0;
};

/// Two-phase revised simplex with a dense LU-factorized basis.
///
/// Infeasible and unbounded problems are reported through `status`. Throws
/// InvalidProblem for inconsistent shapes or non-finite data and
/// CycleLimitExceeded if the iteration cap is hit. The result is a
/// deterministic function of the input.
LpSolution solve_lp(const LpProblem& problem, const SimplexOptions& options = {});

}  // namespace baryflow
