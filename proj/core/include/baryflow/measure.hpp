#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace baryflow {

using Point = Eigen::VectorXd;

/// Atoms closer than this (Euclidean) are merged by canonicalize().
inline constexpr double kMergeTolerance = 1e-9;
/// Allowed deviation of the total mass from one.
inline constexpr double kMassTolerance = 1e-12;
/// Per-atom tolerance for plan and coupling marginals.
inline constexpr double kMarginalTolerance = 1e-10;

/// Weighted point cloud in R^d. Immutable once built.
///
/// The constructor only checks that there is one weight per point; the
/// probability-measure invariants are checked by validate() so that invalid
/// inputs can be loaded, inspected, and rejected with a precise error.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  DiscreteMeasure(std::vector<Point> points, std::vector<double> weights);

  static DiscreteMeasure dirac(Point at);
  static DiscreteMeasure uniform(std::vector<Point> points);

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  /// Dimension of the first point, 0 for an empty measure.
  std::size_t dim() const noexcept;

  const std::vector<Point>& points() const noexcept { return points_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const Point& point(std::size_t i) const { return points_.at(i); }
  double weight(std::size_t i) const { return weights_.at(i); }

  double total_mass() const noexcept;

 private:
  std::vector<Point> points_;
  std::vector<double> weights_;
};

/// Throws Error with NegativeWeight, WeightSumMismatch, DimensionMismatch,
/// NonFiniteCoordinate or EmptyMeasure. Does not canonicalize.
void validate(const DiscreteMeasure& m);

/// Merges atoms within `merge_tol` of an earlier atom (the earlier point is
/// kept), drops zero-mass atoms, and sorts atoms lexicographically.
DiscreteMeasure canonicalize(const DiscreteMeasure& m,
                             double merge_tol = kMergeTolerance);

using PointMap = std::function<Point(const Point&)>;

/// f_# m, canonicalized. Throws NonFiniteImage if f produces a non-finite
/// coordinate.
DiscreteMeasure pushforward(const DiscreteMeasure& m, const PointMap& f);

DiscreteMeasure translate(const DiscreteMeasure& m, const Point& shift);

/// Largest atom-wise mismatch between two measures: every atom of `a` is
/// matched greedily to the closest unused atom of `b`, and the result is the
/// max over matches of max(point distance, |weight difference|). Returns
/// +infinity when the canonical supports have different sizes.
double measure_discrepancy(const DiscreteMeasure& a, const DiscreteMeasure& b);

/// Sparse two-marginal transport plan with optional Kantorovich potentials.
struct TransportEntry {
  std::size_t source;
  std::size_t target;
  double mass;
};

struct Coupling {
  std::size_t n_source = 0;
  std::size_t n_target = 0;
  std::vector<TransportEntry> entries;
  std::vector<double> source_potentials;
  std::vector<double> target_potentials;
};

/// max over atoms of |row/column sum - prescribed weight|.
double marginal_error(const Coupling& coupling, const DiscreteMeasure& source,
                      const DiscreteMeasure& target);

/// One atom of an N-marginal plan: the index of the chosen atom in each
/// marginal, and the mass placed on that tuple.
struct PlanEntry {
  std::vector<std::size_t> index;
  double mass;
};

struct MultiPlan {
  std::size_t marginal_count = 0;
  std::vector<PlanEntry> entries;
};

/// The k-th (0-based) marginal of `plan`, laid out on `support` atom by atom
/// (atoms that receive no mass keep weight 0; no canonicalization).
/// Throws IndexOutOfRange for k >= N or an entry index outside `support`.
DiscreteMeasure marginal(const MultiPlan& plan, std::size_t k,
                         std::span<const Point> support);

/// Same, taking the support from the k-th measure.
DiscreteMeasure marginal(const MultiPlan& plan, std::size_t k,
                         std::span<const DiscreteMeasure> measures);

/// max over k and atoms of |marginal_k(plan) - mu_k|.
double marginal_error(const MultiPlan& plan,
                      std::span<const DiscreteMeasure> measures);

/// Common dimension of all measures; throws DimensionMismatch otherwise and
/// EmptyMeasure if the list is empty.
std::size_t common_dimension(std::span<const DiscreteMeasure> measures);

}  // namespace baryflow
