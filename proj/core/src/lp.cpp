#include "baryflow/lp.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "baryflow/error.hpp"

namespace baryflow {
namespace {

// Entries of B^{-1} A_q below this are treated as zero in the ratio test.
constexpr double kPivotTolerance = 1e-9;
// Ratios closer than this count as tied and fall back to Bland's leaving rule.
constexpr double kRatioTieTolerance = 1e-12;

enum class PhaseOutcome { Optimal, Unbounded };

// Simplex iterations over the working matrix [A | I]. Columns at or beyond
// `enterable` (the artificials in phase 2) never enter the basis.
class RevisedSimplex {
 public:
  RevisedSimplex(const Eigen::MatrixXd& work, const Eigen::VectorXd& rhs,
                 const SimplexOptions& options)
      : work_(work), rhs_(rhs), options_(options) {
    const auto rows = static_cast<std::size_t>(work_.rows());
    const auto cols = static_cast<std::size_t>(work_.cols());
    bland_after_ = options_.bland_after ? options_.bland_after : 3 * (rows + cols);
    max_iterations_ =
        options_.max_iterations ? options_.max_iterations : 50 * (rows + cols) + 1000;
  }

  std::vector<Eigen::Index>& basis() { return basis_; }
  std::size_t iterations() const { return total_iterations_; }

  PhaseOutcome run(const Eigen::VectorXd& cost, Eigen::Index enterable) {
    const Eigen::Index rows = work_.rows();
    std::vector<bool> in_basis(static_cast<std::size_t>(work_.cols()), false);

    for (std::size_t iter = 0;; ++iter) {
      if (iter >= max_iterations_) {
        throw Error(ErrorCode::CycleLimitExceeded,
                    "simplex did not terminate within " +
                        std::to_string(max_iterations_) + " iterations");
      }
      factor();
      const Eigen::VectorXd x_basic = lu_.solve(rhs_);
      Eigen::VectorXd cost_basic(rows);
      for (Eigen::Index r = 0; r < rows; ++r) cost_basic[r] = cost[basis_[r]];
      const Eigen::VectorXd duals = lu_transposed_.solve(cost_basic);

      std::fill(in_basis.begin(), in_basis.end(), false);
      for (Eigen::Index j : basis_) in_basis[static_cast<std::size_t>(j)] = true;

      const Eigen::VectorXd priced =
          work_.leftCols(enterable).transpose() * duals;
      const bool bland = iter >= bland_after_;
      Eigen::Index entering = -1;
      double most_negative = 0.0;
      for (Eigen::Index j = 0; j < enterable; ++j) {
        if (in_basis[static_cast<std::size_t>(j)]) continue;
        const double reduced = cost[j] - priced[j];
        if (reduced >= -options_.optimality_tol * (1.0 + std::abs(cost[j]))) continue;
        if (bland) {
          entering = j;
          break;
        }
        if (reduced < most_negative) {
          most_negative = reduced;
          entering = j;
        }
      }
      if (entering < 0) return PhaseOutcome::Optimal;

      const Eigen::VectorXd direction = lu_.solve(work_.col(entering));
      Eigen::Index leaving = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index r = 0; r < rows; ++r) {
        if (direction[r] <= kPivotTolerance) continue;
        const double ratio = std::max(x_basic[r], 0.0) / direction[r];
        if (ratio < best_ratio - kRatioTieTolerance) {
          best_ratio = ratio;
          leaving = r;
        } else if (ratio <= best_ratio + kRatioTieTolerance &&
                   basis_[r] < basis_[leaving]) {
          best_ratio = std::min(best_ratio, ratio);
          leaving = r;
        }
      }
      if (leaving < 0) return PhaseOutcome::Unbounded;

      basis_[leaving] = entering;
      ++total_iterations_;
    }
  }

  void factor() {
    const Eigen::Index rows = work_.rows();
    Eigen::MatrixXd basis_matrix(rows, rows);
    for (Eigen::Index r = 0; r < rows; ++r) basis_matrix.col(r) = work_.col(basis_[r]);
    lu_.compute(basis_matrix);
    lu_transposed_.compute(basis_matrix.transpose());
  }

  const Eigen::PartialPivLU<Eigen::MatrixXd>& lu() const { return lu_; }
  const Eigen::PartialPivLU<Eigen::MatrixXd>& lu_transposed() const { return lu_transposed_; }

 private:
  const Eigen::MatrixXd& work_;
  const Eigen::VectorXd& rhs_;
  SimplexOptions options_;
  std::vector<Eigen::Index> basis_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_transposed_;
  std::size_t bland_after_ = 0;
  std::size_t max_iterations_ = 0;
  std::size_t total_iterations_ = 0;
};

void check_problem(const LpProblem& p) {
  const Eigen::Index rows = p.constraints.rows();
  const Eigen::Index cols = p.constraints.cols();
  if (rows < 1 || cols < 1) {
    throw Error(ErrorCode::InvalidProblem, "LP needs at least one row and one column");
  }
  if (p.cost.size() != cols || p.rhs.size() != rows) {
    throw Error(ErrorCode::InvalidProblem, "LP cost/rhs sizes do not match the matrix");
  }
  if (!p.cost.allFinite() || !p.constraints.allFinite() || !p.rhs.allFinite()) {
    throw Error(ErrorCode::InvalidProblem, "LP data must be finite");
  }
}

}  // namespace

LpSolution solve_lp(const LpProblem& problem, const SimplexOptions& options) {
  check_problem(problem);
  const Eigen::Index rows = problem.constraints.rows();
  const Eigen::Index cols = problem.constraints.cols();

  // Flip rows so that rhs >= 0 and the artificial basis starts feasible.
  Eigen::VectorXd sign = Eigen::VectorXd::Ones(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (problem.rhs[r] < 0.0) sign[r] = -1.0;
  }
  Eigen::MatrixXd work(rows, cols + rows);
  work.leftCols(cols) = sign.asDiagonal() * problem.constraints;
  work.rightCols(rows).setIdentity();
  const Eigen::VectorXd rhs = sign.asDiagonal() * problem.rhs;

  RevisedSimplex simplex(work, rhs, options);
  auto& basis = simplex.basis();
  basis.resize(static_cast<std::size_t>(rows));
  for (Eigen::Index r = 0; r < rows; ++r) basis[r] = cols + r;

  // Phase 1: minimize the sum of artificials.
  Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(cols + rows);
  phase1_cost.tail(rows).setOnes();
  simplex.run(phase1_cost, cols + rows);
  simplex.factor();
  {
    const Eigen::VectorXd x_basic = simplex.lu().solve(rhs);
    double infeasibility = 0.0;
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (basis[r] >= cols) infeasibility += std::abs(x_basic[r]);
    }
    if (infeasibility > options.feasibility_tol * (1.0 + rhs.lpNorm<1>())) {
      LpSolution out;
      out.status = LpStatus::Infeasible;
      out.iterations = simplex.iterations();
      return out;
    }
  }

  // Pivot zero-level artificials out where some structural column can take
  // their place. An artificial that cannot leave marks a redundant row; it
  // stays basic at zero for the rest of the solve and its row gets dual 0.
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (basis[r] < cols) continue;
    simplex.factor();
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(rows);
    unit[r] = 1.0;
    const Eigen::VectorXd row_of_inverse = simplex.lu_transposed().solve(unit);
    const Eigen::VectorXd tableau_row = work.leftCols(cols).transpose() * row_of_inverse;
    std::vector<bool> in_basis(static_cast<std::size_t>(cols + rows), false);
    for (Eigen::Index j : basis) in_basis[static_cast<std::size_t>(j)] = true;
    Eigen::Index best = -1;
    double best_abs = kPivotTolerance;
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (in_basis[static_cast<std::size_t>(j)]) continue;
      if (std::abs(tableau_row[j]) > best_abs) {
        best_abs = std::abs(tableau_row[j]);
        best = j;
      }
    }
    if (best >= 0) basis[r] = best;
  }

  // Phase 2 on the original costs; artificials cost 0 and may not re-enter.
  Eigen::VectorXd phase2_cost = Eigen::VectorXd::Zero(cols + rows);
  phase2_cost.head(cols) = problem.cost;
  const PhaseOutcome outcome = simplex.run(phase2_cost, cols);

  LpSolution out;
  out.iterations = simplex.iterations();
  if (outcome == PhaseOutcome::Unbounded) {
    out.status = LpStatus::Unbounded;
    return out;
  }

  simplex.factor();
  const auto& lu = simplex.lu();
  const auto& lu_t = simplex.lu_transposed();
  Eigen::MatrixXd basis_matrix(rows, rows);
  Eigen::VectorXd cost_basic(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    basis_matrix.col(r) = work.col(basis[r]);
    cost_basic[r] = phase2_cost[basis[r]];
  }
  // One step of iterative refinement on both the primal and the dual solve.
  Eigen::VectorXd x_basic = lu.solve(rhs);
  x_basic += lu.solve(rhs - basis_matrix * x_basic);
  Eigen::VectorXd duals = lu_t.solve(cost_basic);
  duals += lu_t.solve(cost_basic - basis_matrix.transpose() * duals);

  out.status = LpStatus::Optimal;
  out.x = Eigen::VectorXd::Zero(cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (basis[r] >= cols) continue;
    double v = x_basic[r];
    if (v < 0.0 && v >= -options.feasibility_tol) v = 0.0;
    out.x[basis[r]] = v;
  }
  out.duals = sign.asDiagonal() * duals;
  out.value = problem.cost.dot(out.x);
  return out;
}

}  // namespace baryflow
