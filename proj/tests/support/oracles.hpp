#pragma once

// Reference computations used only by the tests. None of these call into the
// solver code they are compared against, except solve_lp for the exhaustive
// multi-marginal LP, whose matrix and costs are built here from scratch.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "baryflow/lp.hpp"
#include "baryflow/measure.hpp"

namespace oracle {

inline double pow_norm(const Eigen::VectorXd& v, double p) { return std::pow(v.norm(), p); }

/// Golden-section minimum of a unimodal function on [lo, hi].
inline double golden_min(const std::function<double(double)>& f, double lo, double hi,
                         double* argmin = nullptr, int iters = 200) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int k = 0; k < iters && b - a > 1e-15 * (1.0 + std::abs(a)); ++k) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  if (argmin) *argmin = x;
  return f(x);
}

/// min_z sum_i |x_i - z|^p by nested golden-section searches over the
/// bounding box (the objective is convex, so each partial minimum is too).
inline double nested_infconv(const std::vector<Eigen::VectorXd>& xs, double p) {
  const Eigen::Index d = xs.front().size();
  Eigen::VectorXd lo = xs.front(), hi = xs.front();
  for (const auto& x : xs) {
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  Eigen::VectorXd z(d);
  std::function<double(Eigen::Index)> solve = [&](Eigen::Index k) -> double {
    if (k == d) {
      double s = 0.0;
      for (const auto& x : xs) s += pow_norm(x - z, p);
      return s;
    }
    return golden_min(
        [&](double v) {
          z[k] = v;
          return solve(k + 1);
        },
        lo[k], hi[k], nullptr, k + 1 == d ? 200 : 90);
  };
  return solve(0);
}

/// 1-D minimizer of sum |x_i - z|^p: grid scan with the given step over the
/// hull, then golden-section refinement in the neighbouring cells.
struct GridMin {
  double z;
  double value;
};

inline GridMin grid_infconv_1d(const std::vector<double>& xs, double p, double step = 1e-6) {
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  const double lo = *lo_it, hi = *hi_it;
  auto f = [&](double z) {
    double s = 0.0;
    for (double x : xs) s += std::pow(std::abs(x - z), p);
    return s;
  };
  const auto cells = static_cast<std::int64_t>(std::ceil((hi - lo) / step));
  double best_z = lo, best = f(lo);
  for (std::int64_t k = 1; k <= cells; ++k) {
    const double z = std::min(lo + static_cast<double>(k) * step, hi);
    const double v = f(z);
    if (v < best) {
      best = v;
      best_z = z;
    }
  }
  double z = best_z;
  const double v = golden_min(f, std::max(lo, best_z - step), std::min(hi, best_z + step), &z);
  return v < best ? GridMin{z, v} : GridMin{best_z, best};
}

/// W_p^p between two uniform measures with the same number of atoms, by
/// enumerating every permutation (the vertices of the Birkhoff polytope).
inline double permutation_wpp(const std::vector<Eigen::VectorXd>& xs,
                              const std::vector<Eigen::VectorXd>& ys, double p) {
  std::vector<std::size_t> perm(xs.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) s += pow_norm(xs[i] - ys[perm[i]], p);
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(xs.size());
}

/// Multi-marginal LP over the full product grid with every marginal row kept
/// (so the matrix is rank deficient by N - 1) and costs from nested_infconv.
/// Tuples are enumerated first index fastest, unlike the library.
inline double exhaustive_mmot(const std::vector<baryflow::DiscreteMeasure>& mus, double p) {
  const std::size_t N = mus.size();
  std::size_t cols = 1, rows = 0;
  for (const auto& m : mus) {
    cols *= m.size();
    rows += m.size();
  }
  baryflow::LpProblem lp;
  lp.cost.resize(static_cast<Eigen::Index>(cols));
  lp.constraints = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows),
                                         static_cast<Eigen::Index>(cols));
  lp.rhs.resize(static_cast<Eigen::Index>(rows));
  {
    std::size_t r = 0;
    for (const auto& m : mus) {
      for (std::size_t a = 0; a < m.size(); ++a) lp.rhs[static_cast<Eigen::Index>(r++)] = m.weight(a);
    }
  }
  for (std::size_t col = 0; col < cols; ++col) {
    std::size_t rest = col, offset = 0;
    std::vector<Eigen::VectorXd> xs;
    for (std::size_t k = 0; k < N; ++k) {
      const std::size_t a = rest % mus[k].size();
      rest /= mus[k].size();
      xs.push_back(mus[k].point(a));
      lp.constraints(static_cast<Eigen::Index>(offset + a), static_cast<Eigen::Index>(col)) = 1.0;
      offset += mus[k].size();
    }
    lp.cost[static_cast<Eigen::Index>(col)] = nested_infconv(xs, p);
  }
  const auto sol = baryflow::solve_lp(lp);
  return sol.value;
}

/// Seeded uniform point cloud in [lo, hi]^d.
inline std::vector<Eigen::VectorXd> random_points(std::mt19937_64& rng, std::size_t n,
                                                  std::size_t d, double lo = -1.0,
                                                  double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Eigen::VectorXd> pts;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(d));
    for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = u(rng);
    pts.push_back(std::move(x));
  }
  return pts;
}

}  // namespace oracle
