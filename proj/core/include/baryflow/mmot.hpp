#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "baryflow/infconv.hpp"
#include "baryflow/lp.hpp"
#include "baryflow/measure.hpp"

namespace baryflow {

/// Optimal two-marginal plan for |x - y|^p. The coupling carries the LP
/// duals: source_potentials psi on mu, target_potentials on nu, with
/// psi(x_a) + phi(y_b) <= |x_a - y_b|^p.
struct PairwiseResult {
  Coupling coupling;
  /// W_p^p(mu, nu)
  double value = 0.0;
};

/// Exact W_p^p(mu, nu) by linear programming. Both measures must validate
/// and share a dimension; LP failures surface as Error.
PairwiseResult solve_pairwise(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                              Exponent p, const SimplexOptions& lp = {});

struct EntropicOptions {
  double epsilon = 1e-2;
  /// Max marginal error of the returned coupling.
  double tol = 1e-9;
  int max_iterations = 200000;
};

/// Entropically regularized transport (reference measure mu x nu): log-domain
/// Sinkhorn with epsilon scaling, finished by Newton steps on the marginal
/// equations. `value` is the transport cost of the regularized plan, which
/// exceeds W_p^p by at most epsilon * log(min(n, m)). Not a certificate;
/// never used for the exact checks. Throws NoConvergence.
PairwiseResult solve_pairwise_entropic(const DiscreteMeasure& mu,
                                       const DiscreteMeasure& nu, Exponent p,
                                       const EntropicOptions& options);

inline constexpr std::size_t kDefaultMaxGrid = 200000;

struct MmotOptions {
  /// Upper bound on prod_i n_i, the number of LP columns.
  std::size_t max_grid = kDefaultMaxGrid;
  InfConvOptions infconv;
  SimplexOptions lp;
};

struct MmotResult {
  Exponent p{2.0};
  std::vector<DiscreteMeasure> marginals;
  MultiPlan plan;
  /// C(mu_1, ..., mu_N)
  double value = 0.0;
  /// z_bar for each plan entry, same order as plan.entries.
  std::vector<Point> tuple_barycenters;
  /// c(x_{i_1}, ..., x_{i_N}) for each plan entry.
  std::vector<double> tuple_costs;
  /// phi_k on the atoms of mu_k, from the LP duals.
  std::vector<std::vector<double>> duals;
};

/// Number of tuples in the product of the supports; saturates on overflow.
std::size_t product_grid_size(std::span<const DiscreteMeasure> mus);

/// Multi-marginal transport with the infimal convolution cost, solved as a
/// dense LP over the full product grid. Throws ProductGridTooLarge when the
/// grid exceeds options.max_grid, InvalidProblem for N < 2.
MmotResult solve_mmot(std::span<const DiscreteMeasure> mus, Exponent p,
                      const MmotOptions& options = {});

/// The barycentre measure: the plan pushed forward by tuple -> z_bar,
/// canonicalized.
DiscreteMeasure extract_barycenter(const MmotResult& res);

/// sum_i W_p^p(nu, mu_i).
double wb_value(const DiscreteMeasure& nu, std::span<const DiscreteMeasure> mus,
                Exponent p);

/// Discrete c-transform psi^c(x) = min_y |x - y|^p - psi(y), for each x in
/// `targets`, where psi lives on `support`.
std::vector<double> c_transform(std::span<const double> psi,
                                std::span<const Point> support,
                                std::span<const Point> targets, Exponent p);

struct DualReport {
  /// max over the full product grid of (sum_k phi_k - c)^+
  double max_violation = 0.0;
  /// |sum_k <phi_k, mu_k> - C|
  double duality_gap = 0.0;
  /// max over plan entries of |c - sum_k phi_k|
  double max_slackness = 0.0;
};

DualReport dual_feasibility_check(const MmotResult& res);

/// Potentials psi_i on the atoms of `barycenter`, psi_i = phi_i^c. On the
/// barycentre support they sum to zero (up to LP accuracy).
std::vector<std::vector<double>> barycenter_potentials(const MmotResult& res,
                                                       const DiscreteMeasure& barycenter);

}  // namespace baryflow
