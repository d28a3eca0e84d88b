#include <random>

#include <gtest/gtest.h>

#include "baryflow/error.hpp"
#include "baryflow/lp.hpp"
#include "oracles.hpp"

using baryflow::LpProblem;
using baryflow::LpStatus;

namespace {

// Transportation LP between two uniform n-point clouds, all row constraints
// kept. Columns are (i, j) with j fastest.
LpProblem assignment_lp(const std::vector<Eigen::VectorXd>& xs,
                        const std::vector<Eigen::VectorXd>& ys, double p) {
  const auto n = static_cast<Eigen::Index>(xs.size());
  LpProblem lp;
  lp.cost.resize(n * n);
  lp.constraints = Eigen::MatrixXd::Zero(2 * n, n * n);
  lp.rhs = Eigen::VectorXd::Constant(2 * n, 1.0 / static_cast<double>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      lp.cost[i * n + j] = oracle::pow_norm(xs[i] - ys[j], p);
      lp.constraints(i, i * n + j) = 1.0;
      lp.constraints(n + j, i * n + j) = 1.0;
    }
  }
  return lp;
}

}  // namespace

TEST(Lp, DegenerateOptimumHasUniqueValue) {
  LpProblem lp{Eigen::Vector2d(1, 1), Eigen::RowVector2d(1, 1), Eigen::VectorXd::Ones(1)};
  const auto sol = baryflow::solve_lp(lp);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_DOUBLE_EQ(sol.value, 1.0);
  EXPECT_TRUE((sol.x.array() >= 0).all());
  EXPECT_DOUBLE_EQ(sol.x.sum(), 1.0);
}

TEST(Lp, Unbounded) {
  // min -x1  s.t.  x1 - s = 1  (x1 >= 1 with slack s).
  LpProblem lp{Eigen::Vector2d(-1, 0), Eigen::RowVector2d(1, -1), Eigen::VectorXd::Ones(1)};
  EXPECT_EQ(baryflow::solve_lp(lp).status, LpStatus::Unbounded);
}

TEST(Lp, Infeasible) {
  Eigen::MatrixXd A(2, 2);
  A << 1, 1, 1, 1;
  LpProblem lp{Eigen::Vector2d(1, 1), A, Eigen::Vector2d(1, 2)};
  EXPECT_EQ(baryflow::solve_lp(lp).status, LpStatus::Infeasible);
}

TEST(Lp, NegativeRhsIsHandled) {
  // -x1 - x2 = -2, min x1 + 2 x2 -> x = (2, 0).
  LpProblem lp{Eigen::Vector2d(1, 2), Eigen::RowVector2d(-1, -1), Eigen::VectorXd::Constant(1, -2)};
  const auto sol = baryflow::solve_lp(lp);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_NEAR(sol.value, 2.0, 1e-14);
  EXPECT_NEAR(sol.duals[0], -1.0, 1e-14);
}

TEST(Lp, InvalidShapes) {
  LpProblem lp{Eigen::Vector3d(1, 1, 1), Eigen::RowVector2d(1, 1), Eigen::VectorXd::Ones(1)};
  try {
    baryflow::solve_lp(lp);
    FAIL();
  } catch (const baryflow::Error& e) {
    EXPECT_EQ(e.code(), baryflow::ErrorCode::InvalidProblem);
  }
}

TEST(Lp, IterationCapRaisesCycleLimit) {
  std::mt19937_64 rng(3);
  const auto xs = oracle::random_points(rng, 5, 2), ys = oracle::random_points(rng, 5, 2);
  baryflow::SimplexOptions opts;
  opts.max_iterations = 1;
  try {
    baryflow::solve_lp(assignment_lp(xs, ys, 2.0), opts);
    FAIL();
  } catch (const baryflow::Error& e) {
    EXPECT_EQ(e.code(), baryflow::ErrorCode::CycleLimitExceeded);
  }
}

TEST(Lp, ThreePointAssignmentMatchesPermutations) {
  std::mt19937_64 rng(11);
  const auto xs = oracle::random_points(rng, 3, 2), ys = oracle::random_points(rng, 3, 2);
  const auto sol = baryflow::solve_lp(assignment_lp(xs, ys, 2.0));
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_NEAR(sol.value, oracle::permutation_wpp(xs, ys, 2.0), 1e-12);
}

// Seeded property loop: strong duality, dual feasibility, complementary
// slackness, and invariance of the value under column reordering.
TEST(LpProperty, DualityAndColumnOrder) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(2, 6);
  std::uniform_real_distribution<double> pick_p(1.2, 3.5);
  for (int trial = 0; trial < 40; ++trial) {
    const auto n = static_cast<std::size_t>(size(rng));
    const double p = pick_p(rng);
    const auto xs = oracle::random_points(rng, n, 2), ys = oracle::random_points(rng, n, 2);
    const LpProblem lp = assignment_lp(xs, ys, p);
    const auto sol = baryflow::solve_lp(lp);
    ASSERT_EQ(sol.status, LpStatus::Optimal);

    EXPECT_NEAR(sol.value, oracle::permutation_wpp(xs, ys, p), 1e-10) << trial;
    EXPECT_NEAR(sol.duals.dot(lp.rhs), sol.value, 1e-10) << trial;
    const Eigen::VectorXd reduced = lp.cost - lp.constraints.transpose() * sol.duals;
    EXPECT_GE(reduced.minCoeff(), -1e-9) << trial;
    EXPECT_LT((reduced.array() * sol.x.array()).abs().maxCoeff(), 1e-10) << trial;
    EXPECT_LT((lp.constraints * sol.x - lp.rhs).lpNorm<Eigen::Infinity>(), 1e-12) << trial;

    std::vector<Eigen::Index> perm(static_cast<std::size_t>(lp.cost.size()));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    LpProblem shuffled{Eigen::VectorXd(lp.cost.size()), Eigen::MatrixXd(lp.constraints.rows(), lp.cost.size()),
                       lp.rhs};
    for (std::size_t j = 0; j < perm.size(); ++j) {
      shuffled.cost[static_cast<Eigen::Index>(j)] = lp.cost[perm[j]];
      shuffled.constraints.col(static_cast<Eigen::Index>(j)) = lp.constraints.col(perm[j]);
    }
    EXPECT_NEAR(baryflow::solve_lp(shuffled).value, sol.value, 1e-10) << trial;
  }
}

TEST(LpProperty, Deterministic) {
  std::mt19937_64 rng(5);
  const auto xs = oracle::random_points(rng, 4, 3), ys = oracle::random_points(rng, 4, 3);
  const auto lp = assignment_lp(xs, ys, 1.5);
  const auto a = baryflow::solve_lp(lp), b = baryflow::solve_lp(lp);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.duals, b.duals);
}
