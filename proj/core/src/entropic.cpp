#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>

#include "baryflow/error.hpp"
#include "baryflow/mmot.hpp"

namespace baryflow {
namespace {

double log_sum_exp(const Eigen::VectorXd& v) {
  const double top = v.maxCoeff();
  if (!std::isfinite(top)) return top;
  return top + std::log((v.array() - top).exp().sum());
}

}  // namespace

PairwiseResult solve_pairwise_entropic(const DiscreteMeasure& mu,
                                       const DiscreteMeasure& nu, Exponent p,
                                       const EntropicOptions& options) {
  validate(mu);
  validate(nu);
  if (mu.dim() != nu.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "pairwise measures differ in dimension");
  }
  if (!(options.epsilon > 0.0)) {
    throw Error(ErrorCode::InvalidProblem, "entropic epsilon must be positive");
  }
  const auto n = static_cast<Eigen::Index>(mu.size());
  const auto m = static_cast<Eigen::Index>(nu.size());

  Eigen::MatrixXd cost(n, m);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      cost(a, b) = cp(mu.point(static_cast<std::size_t>(a)) - nu.point(static_cast<std::size_t>(b)), p);
    }
  }
  Eigen::VectorXd log_mu(n), log_nu(m);
  for (Eigen::Index a = 0; a < n; ++a) log_mu[a] = std::log(mu.weight(static_cast<std::size_t>(a)));
  for (Eigen::Index b = 0; b < m; ++b) log_nu[b] = std::log(nu.weight(static_cast<std::size_t>(b)));

  // Plan: P_ab = exp((f_a + g_b - C_ab) / eps) mu_a nu_b.
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
  const auto log_plan = [&](double eps) {
    Eigen::MatrixXd lp(n, m);
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < m; ++b) {
        lp(a, b) = (f[a] + g[b] - cost(a, b)) / eps + log_mu[a] + log_nu[b];
      }
    }
    return lp;
  };

  const auto marginal_residual = [&](double eps) {
    const Eigen::MatrixXd plan = log_plan(eps).array().exp().matrix();
    Eigen::VectorXd r(n + m);
    r.head(n) = plan.rowwise().sum() - log_mu.array().exp().matrix();
    r.tail(m) = plan.colwise().sum().transpose() - log_nu.array().exp().matrix();
    return r;
  };
  const auto sinkhorn_sweep = [&](double eps) {
    for (Eigen::Index a = 0; a < n; ++a) {
      const Eigen::VectorXd row = (g - cost.row(a).transpose()) / eps + log_nu;
      f[a] = -eps * log_sum_exp(row);
    }
    for (Eigen::Index b = 0; b < m; ++b) {
      const Eigen::VectorXd col = (f - cost.col(b)) / eps + log_mu;
      g[b] = -eps * log_sum_exp(col);
    }
  };

  // Epsilon scaling: anneal from the cost scale down to the target epsilon,
  // warm-starting the potentials, with a loose marginal target per stage.
  constexpr double kStageFactor = 0.5;
  constexpr double kSinkhornTolerance = 1e-4;
  const double eps = options.epsilon;
  double err = std::numeric_limits<double>::infinity();
  int iter = 0;
  for (double stage = std::max(eps, cost.maxCoeff());; stage = std::max(eps, stage * kStageFactor)) {
    const double stage_tol = std::max(options.tol, kSinkhornTolerance);
    for (; iter < options.max_iterations; ++iter) {
      sinkhorn_sweep(stage);
      if (iter % 10 == 0 && marginal_residual(stage).lpNorm<Eigen::Infinity>() <= stage_tol) break;
    }
    if (stage <= eps || iter >= options.max_iterations) break;
  }

  // Newton on the marginal equations in (f, g), with g's last entry pinned
  // (the system is invariant under f + s, g - s) and the last column
  // equation dropped (it follows from the others). Sinkhorn alone converges
  // only linearly, and very slowly for small epsilon.
  err = marginal_residual(eps).lpNorm<Eigen::Infinity>();
  const Eigen::Index k = n + m - 1;
  for (; iter < options.max_iterations && err > options.tol; ++iter) {
    const Eigen::MatrixXd plan = log_plan(eps).array().exp().matrix();
    const Eigen::VectorXd r = marginal_residual(eps);
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(k, k);
    jac.topLeftCorner(n, n).diagonal() = plan.rowwise().sum();
    jac.topRightCorner(n, m - 1) = plan.leftCols(m - 1);
    jac.bottomLeftCorner(m - 1, n) = plan.leftCols(m - 1).transpose();
    jac.bottomRightCorner(m - 1, m - 1).diagonal() = plan.leftCols(m - 1).colwise().sum().transpose();
    // Symmetric diagonal scaling keeps the solve accurate when plan entries
    // span many orders of magnitude.
    const Eigen::VectorXd scale =
        jac.diagonal().cwiseMax(std::numeric_limits<double>::min()).cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd scaled = scale.asDiagonal() * jac * scale.asDiagonal();
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(scaled);
    const Eigen::VectorXd rhs = scale.asDiagonal() * r.head(k);
    Eigen::VectorXd y = ldlt.solve(rhs);
    y += ldlt.solve(rhs - scaled * y);
    const Eigen::VectorXd step = -eps * (scale.asDiagonal() * y);

    const Eigen::VectorXd f0 = f, g0 = g;
    double t = 1.0;
    for (; t > 1e-10; t *= 0.5) {
      f = f0 + t * step.head(n);
      g.head(m - 1) = g0.head(m - 1) + t * step.tail(m - 1);
      const double trial = marginal_residual(eps).lpNorm<Eigen::Infinity>();
      if (trial < err) {
        err = trial;
        break;
      }
    }
    if (t <= 1e-10) {
      // No progress along the Newton direction; fall back to one sweep.
      f = f0;
      g = g0;
      sinkhorn_sweep(eps);
      err = marginal_residual(eps).lpNorm<Eigen::Infinity>();
    }
  }
  if (!(err <= options.tol)) {
    throw Error(ErrorCode::NoConvergence,
                "Sinkhorn marginal error " + std::to_string(err) + " after " +
                    std::to_string(iter) + " iterations");
  }

  const Eigen::MatrixXd plan = log_plan(options.epsilon).array().exp().matrix();
  PairwiseResult out;
  out.coupling.n_source = mu.size();
  out.coupling.n_target = nu.size();
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      if (plan(a, b) > 0.0) {
        out.coupling.entries.push_back(
            {static_cast<std::size_t>(a), static_cast<std::size_t>(b), plan(a, b)});
        out.value += plan(a, b) * cost(a, b);
      }
    }
  }
  out.coupling.source_potentials.assign(f.data(), f.data() + n);
  out.coupling.target_potentials.assign(g.data(), g.data() + m);
  return out;
}

}  // namespace baryflow
