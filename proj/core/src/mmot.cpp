#include "baryflow/mmot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "baryflow/error.hpp"

namespace baryflow {
namespace {

// Basic LP variables below this are rounding noise, not transported mass.
constexpr double kMassFloor = 1e-14;

void require_optimal(const LpSolution& sol, const char* what) {
  switch (sol.status) {
    case LpStatus::Optimal: return;
    case LpStatus::Infeasible:
      throw Error(ErrorCode::Infeasible, std::string(what) + " LP is infeasible");
    case LpStatus::Unbounded:
      throw Error(ErrorCode::Unbounded, std::string(what) + " LP is unbounded");
  }
}

// Mixed-radix counter over the product grid, last index fastest.
bool next_tuple(std::vector<std::size_t>& tuple, std::span<const DiscreteMeasure> mus) {
  for (std::size_t k = tuple.size(); k-- > 0;) {
    if (++tuple[k] < mus[k].size()) return true;
    tuple[k] = 0;
  }
  return false;
}

std::vector<Point> gather(const std::vector<std::size_t>& tuple,
                          std::span<const DiscreteMeasure> mus) {
  std::vector<Point> xs;
  xs.reserve(tuple.size());
  for (std::size_t k = 0; k < tuple.size(); ++k) xs.push_back(mus[k].point(tuple[k]));
  return xs;
}

}  // namespace

PairwiseResult solve_pairwise(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                              Exponent p, const SimplexOptions& lp) {
  validate(mu);
  validate(nu);
  if (mu.dim() != nu.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "pairwise measures differ in dimension");
  }
  const std::size_t n = mu.size();
  const std::size_t m = nu.size();
  const auto vars = static_cast<Eigen::Index>(n * m);
  const auto rows = static_cast<Eigen::Index>(n + m - 1);

  LpProblem problem;
  problem.cost.resize(vars);
  problem.constraints = Eigen::MatrixXd::Zero(rows, vars);
  problem.rhs.resize(rows);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      const auto v = static_cast<Eigen::Index>(a * m + b);
      problem.cost[v] = cp(mu.point(a) - nu.point(b), p);
      problem.constraints(static_cast<Eigen::Index>(a), v) = 1.0;
      // The last column-sum row is implied by the others.
      if (b + 1 < m) problem.constraints(static_cast<Eigen::Index>(n + b), v) = 1.0;
    }
  }
  for (std::size_t a = 0; a < n; ++a) problem.rhs[static_cast<Eigen::Index>(a)] = mu.weight(a);
  for (std::size_t b = 0; b + 1 < m; ++b) {
    problem.rhs[static_cast<Eigen::Index>(n + b)] = nu.weight(b);
  }

  const LpSolution sol = solve_lp(problem, lp);
  require_optimal(sol, "pairwise transport");

  PairwiseResult out;
  out.coupling.n_source = n;
  out.coupling.n_target = m;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      const auto v = static_cast<Eigen::Index>(a * m + b);
      if (sol.x[v] > kMassFloor) out.coupling.entries.push_back({a, b, sol.x[v]});
    }
  }
  out.coupling.source_potentials.assign(sol.duals.data(), sol.duals.data() + n);
  out.coupling.target_potentials.assign(m, 0.0);
  for (std::size_t b = 0; b + 1 < m; ++b) {
    out.coupling.target_potentials[b] = sol.duals[static_cast<Eigen::Index>(n + b)];
  }
  out.value = sol.value;
  return out;
}

std::size_t product_grid_size(std::span<const DiscreteMeasure> mus) {
  std::size_t total = 1;
  for (const DiscreteMeasure& m : mus) {
    if (m.size() != 0 && total > std::numeric_limits<std::size_t>::max() / m.size()) {
      return std::numeric_limits<std::size_t>::max();
    }
    total *= m.size();
  }
  return total;
}

MmotResult solve_mmot(std::span<const DiscreteMeasure> mus, Exponent p,
                      const MmotOptions& options) {
  if (mus.size() < 2) {
    throw Error(ErrorCode::InvalidProblem, "multi-marginal transport needs N >= 2");
  }
  for (const DiscreteMeasure& m : mus) validate(m);
  common_dimension(mus);
  const std::size_t grid = product_grid_size(mus);
  if (grid > options.max_grid) {
    throw Error(ErrorCode::ProductGridTooLarge,
                "product grid has " + std::to_string(grid) + " tuples, cap is " +
                    std::to_string(options.max_grid));
  }

  const std::size_t N = mus.size();
  // Row layout: all atoms of mu_1, then all but the last atom of each later
  // marginal. Each marginal's rows sum to the total mass, so keeping every
  // row would leave N - 1 redundant constraints.
  std::vector<Eigen::Index> row_offset(N, 0);
  Eigen::Index rows = 0;
  for (std::size_t k = 0; k < N; ++k) {
    row_offset[k] = rows;
    rows += static_cast<Eigen::Index>(k == 0 ? mus[k].size() : mus[k].size() - 1);
  }

  const auto vars = static_cast<Eigen::Index>(grid);
  LpProblem problem;
  problem.cost.resize(vars);
  problem.constraints = Eigen::MatrixXd::Zero(rows, vars);
  problem.rhs = Eigen::VectorXd::Zero(rows);

  std::vector<Point> barycenters;
  barycenters.reserve(grid);
  std::vector<std::size_t> tuple(N, 0);
  Eigen::Index v = 0;
  do {
    const InfConvResult inner = barycenter_point(gather(tuple, mus), p, options.infconv);
    problem.cost[v] = inner.value;
    barycenters.push_back(inner.z_bar);
    for (std::size_t k = 0; k < N; ++k) {
      if (k > 0 && tuple[k] + 1 == mus[k].size()) continue;
      problem.constraints(row_offset[k] + static_cast<Eigen::Index>(tuple[k]), v) = 1.0;
    }
    ++v;
  } while (next_tuple(tuple, mus));

  for (std::size_t k = 0; k < N; ++k) {
    const std::size_t kept = k == 0 ? mus[k].size() : mus[k].size() - 1;
    for (std::size_t a = 0; a < kept; ++a) {
      problem.rhs[row_offset[k] + static_cast<Eigen::Index>(a)] = mus[k].weight(a);
    }
  }

  const LpSolution sol = solve_lp(problem, options.lp);
  require_optimal(sol, "multi-marginal transport");

  MmotResult out;
  out.p = p;
  out.marginals.assign(mus.begin(), mus.end());
  out.plan.marginal_count = N;

  std::fill(tuple.begin(), tuple.end(), 0);
  v = 0;
  out.value = 0.0;
  do {
    const double mass = sol.x[v];
    if (mass > kMassFloor) {
      out.plan.entries.push_back({tuple, mass});
      out.tuple_barycenters.push_back(barycenters[static_cast<std::size_t>(v)]);
      out.tuple_costs.push_back(problem.cost[v]);
      out.value += mass * problem.cost[v];
    }
    ++v;
  } while (next_tuple(tuple, mus));

  // LP duals, with dropped rows at 0. The potentials are only determined up
  // to constants summing to zero; fix the gauge by centering phi_1..phi_{N-1}
  // under their own marginal and letting phi_N absorb the shift.
  out.duals.resize(N);
  for (std::size_t k = 0; k < N; ++k) {
    out.duals[k].assign(mus[k].size(), 0.0);
    const std::size_t kept = k == 0 ? mus[k].size() : mus[k].size() - 1;
    for (std::size_t a = 0; a < kept; ++a) {
      out.duals[k][a] = sol.duals[row_offset[k] + static_cast<Eigen::Index>(a)];
    }
  }
  double absorbed = 0.0;
  for (std::size_t k = 0; k + 1 < N; ++k) {
    double mean = 0.0;
    for (std::size_t a = 0; a < mus[k].size(); ++a) mean += mus[k].weight(a) * out.duals[k][a];
    for (double& phi : out.duals[k]) phi -= mean;
    absorbed += mean;
  }
  for (double& phi : out.duals[N - 1]) phi += absorbed;
  return out;
}

DiscreteMeasure extract_barycenter(const MmotResult& res) {
  std::vector<double> masses;
  masses.reserve(res.plan.entries.size());
  for (const PlanEntry& e : res.plan.entries) masses.push_back(e.mass);
  return canonicalize(DiscreteMeasure(res.tuple_barycenters, std::move(masses)));
}

double wb_value(const DiscreteMeasure& nu, std::span<const DiscreteMeasure> mus,
                Exponent p) {
  double total = 0.0;
  for (const DiscreteMeasure& mu : mus) total += solve_pairwise(nu, mu, p).value;
  return total;
}

std::vector<double> c_transform(std::span<const double> psi,
                                std::span<const Point> support,
                                std::span<const Point> targets, Exponent p) {
  if (psi.size() != support.size()) {
    throw Error(ErrorCode::DimensionMismatch, "potential and support differ in length");
  }
  std::vector<double> out(targets.size(), std::numeric_limits<double>::infinity());
  for (std::size_t a = 0; a < targets.size(); ++a) {
    for (std::size_t b = 0; b < support.size(); ++b) {
      out[a] = std::min(out[a], cp(targets[a] - support[b], p) - psi[b]);
    }
  }
  return out;
}

DualReport dual_feasibility_check(const MmotResult& res) {
  const auto& mus = res.marginals;
  const std::size_t N = mus.size();
  DualReport report;

  double dual_value = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    for (std::size_t a = 0; a < mus[k].size(); ++a) {
      dual_value += res.duals[k][a] * mus[k].weight(a);
    }
  }
  report.duality_gap = std::abs(dual_value - res.value);

  std::vector<std::size_t> tuple(N, 0);
  do {
    double phi_sum = 0.0;
    for (std::size_t k = 0; k < N; ++k) phi_sum += res.duals[k][tuple[k]];
    const double cost = infconv_cost(gather(tuple, mus), res.p);
    report.max_violation = std::max(report.max_violation, phi_sum - cost);
  } while (next_tuple(tuple, mus));

  for (std::size_t e = 0; e < res.plan.entries.size(); ++e) {
    double phi_sum = 0.0;
    for (std::size_t k = 0; k < N; ++k) phi_sum += res.duals[k][res.plan.entries[e].index[k]];
    report.max_slackness =
        std::max(report.max_slackness, std::abs(res.tuple_costs[e] - phi_sum));
  }
  return report;
}

std::vector<std::vector<double>> barycenter_potentials(const MmotResult& res,
                                                       const DiscreteMeasure& barycenter) {
  std::vector<std::vector<double>> out;
  out.reserve(res.marginals.size());
  for (std::size_t k = 0; k < res.marginals.size(); ++k) {
    out.push_back(c_transform(res.duals[k], res.marginals[k].points(),
                              barycenter.points(), res.p));
  }
  return out;
}

}  // namespace baryflow
