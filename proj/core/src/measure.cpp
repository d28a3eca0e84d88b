#include "baryflow/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "baryflow/error.hpp"

namespace baryflow {

DiscreteMeasure::DiscreteMeasure(std::vector<Point> points,
                                 std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.size() != weights_.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(points_.size()) + " points but " +
                    std::to_string(weights_.size()) + " weights");
  }
}

DiscreteMeasure DiscreteMeasure::dirac(Point at) {
  return DiscreteMeasure({std::move(at)}, {1.0});
}

DiscreteMeasure DiscreteMeasure::uniform(std::vector<Point> points) {
  const double w = points.empty() ? 0.0 : 1.0 / static_cast<double>(points.size());
  std::vector<double> weights(points.size(), w);
  return DiscreteMeasure(std::move(points), std::move(weights));
}

std::size_t DiscreteMeasure::dim() const noexcept {
  return points_.empty() ? 0 : static_cast<std::size_t>(points_.front().size());
}

double DiscreteMeasure::total_mass() const noexcept {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

void validate(const DiscreteMeasure& m) {
  if (m.empty()) throw Error(ErrorCode::EmptyMeasure, "measure has no atoms");
  const std::size_t d = m.dim();
  if (d == 0) throw Error(ErrorCode::DimensionMismatch, "points have dimension 0");
  for (std::size_t i = 0; i < m.size(); ++i) {
    const Point& x = m.point(i);
    if (static_cast<std::size_t>(x.size()) != d) {
      throw Error(ErrorCode::DimensionMismatch,
                  "point " + std::to_string(i) + " has dimension " +
                      std::to_string(x.size()) + ", expected " + std::to_string(d));
    }
    if (!x.allFinite()) {
      throw Error(ErrorCode::NonFiniteCoordinate,
                  "point " + std::to_string(i) + " has a non-finite coordinate");
    }
    const double w = m.weight(i);
    if (!std::isfinite(w)) {
      throw Error(ErrorCode::WeightSumMismatch,
                  "weight " + std::to_string(i) + " is not finite");
    }
    if (w < 0.0) {
      throw Error(ErrorCode::NegativeWeight,
                  "weight " + std::to_string(i) + " = " + std::to_string(w));
    }
  }
  const double total = m.total_mass();
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw Error(ErrorCode::WeightSumMismatch,
                "weights sum to " + std::to_string(total));
  }
}

namespace {

bool lex_less(const Point& a, const Point& b) {
  const Eigen::Index n = std::min(a.size(), b.size());
  for (Eigen::Index k = 0; k < n; ++k) {
    if (a[k] < b[k]) return true;
    if (b[k] < a[k]) return false;
  }
  return a.size() < b.size();
}

}  // namespace

DiscreteMeasure canonicalize(const DiscreteMeasure& m, double merge_tol) {
  std::vector<Point> points;
  std::vector<double> weights;
  points.reserve(m.size());
  weights.reserve(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.weight(i) == 0.0) continue;
    const Point& x = m.point(i);
    bool merged = false;
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (points[j].size() == x.size() && (points[j] - x).norm() <= merge_tol) {
        weights[j] += m.weight(i);
        merged = true;
        break;
      }
    }
    if (!merged) {
      points.push_back(x);
      weights.push_back(m.weight(i));
    }
  }

  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return lex_less(points[a], points[b]);
  });
  std::vector<Point> sorted_points;
  std::vector<double> sorted_weights;
  sorted_points.reserve(order.size());
  sorted_weights.reserve(order.size());
  for (std::size_t idx : order) {
    sorted_points.push_back(std::move(points[idx]));
    sorted_weights.push_back(weights[idx]);
  }
  return DiscreteMeasure(std::move(sorted_points), std::move(sorted_weights));
}

DiscreteMeasure pushforward(const DiscreteMeasure& m, const PointMap& f) {
  std::vector<Point> images;
  images.reserve(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    Point y = f(m.point(i));
    if (!y.allFinite()) {
      throw Error(ErrorCode::NonFiniteImage,
                  "image of point " + std::to_string(i) + " is not finite");
    }
    images.push_back(std::move(y));
  }
  return canonicalize(DiscreteMeasure(std::move(images), m.weights()));
}

DiscreteMeasure translate(const DiscreteMeasure& m, const Point& shift) {
  std::vector<Point> points;
  points.reserve(m.size());
  for (const Point& x : m.points()) points.push_back(x + shift);
  return DiscreteMeasure(std::move(points), m.weights());
}

double measure_discrepancy(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  const DiscreteMeasure ca = canonicalize(a);
  const DiscreteMeasure cb = canonicalize(b);
  if (ca.size() != cb.size()) return std::numeric_limits<double>::infinity();

  std::vector<bool> used(cb.size(), false);
  double worst = 0.0;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    std::size_t best = cb.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < cb.size(); ++j) {
      if (used[j] || cb.point(j).size() != ca.point(i).size()) continue;
      const double dist = (cb.point(j) - ca.point(i)).norm();
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    if (best == cb.size()) return std::numeric_limits<double>::infinity();
    used[best] = true;
    worst = std::max({worst, best_dist, std::abs(ca.weight(i) - cb.weight(best))});
  }
  return worst;
}

double marginal_error(const Coupling& coupling, const DiscreteMeasure& source,
                      const DiscreteMeasure& target) {
  std::vector<double> rows(source.size(), 0.0);
  std::vector<double> cols(target.size(), 0.0);
  for (const TransportEntry& e : coupling.entries) {
    rows.at(e.source) += e.mass;
    cols.at(e.target) += e.mass;
  }
  double err = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    err = std::max(err, std::abs(rows[i] - source.weight(i)));
  }
  for (std::size_t j = 0; j < cols.size(); ++j) {
    err = std::max(err, std::abs(cols[j] - target.weight(j)));
  }
  return err;
}

DiscreteMeasure marginal(const MultiPlan& plan, std::size_t k,
                         std::span<const Point> support) {
  if (k >= plan.marginal_count) {
    throw Error(ErrorCode::IndexOutOfRange,
                "marginal " + std::to_string(k) + " of a plan with " +
                    std::to_string(plan.marginal_count) + " marginals");
  }
  std::vector<double> weights(support.size(), 0.0);
  for (const PlanEntry& e : plan.entries) {
    if (e.index.size() != plan.marginal_count || e.index[k] >= support.size()) {
      throw Error(ErrorCode::IndexOutOfRange, "plan entry outside the support");
    }
    weights[e.index[k]] += e.mass;
  }
  return DiscreteMeasure(std::vector<Point>(support.begin(), support.end()),
                         std::move(weights));
}

DiscreteMeasure marginal(const MultiPlan& plan, std::size_t k,
                         std::span<const DiscreteMeasure> measures) {
  if (k >= measures.size()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "marginal " + std::to_string(k) + " but only " +
                    std::to_string(measures.size()) + " measures");
  }
  return marginal(plan, k, measures[k].points());
}

double marginal_error(const MultiPlan& plan,
                      std::span<const DiscreteMeasure> measures) {
  double err = 0.0;
  for (std::size_t k = 0; k < plan.marginal_count; ++k) {
    const DiscreteMeasure m = marginal(plan, k, measures);
    for (std::size_t a = 0; a < m.size(); ++a) {
      err = std::max(err, std::abs(m.weight(a) - measures[k].weight(a)));
    }
  }
  return err;
}

std::size_t common_dimension(std::span<const DiscreteMeasure> measures) {
  if (measures.empty()) throw Error(ErrorCode::EmptyMeasure, "no measures given");
  const std::size_t d = measures.front().dim();
  for (std::size_t i = 0; i < measures.size(); ++i) {
    for (const Point& x : measures[i].points()) {
      if (static_cast<std::size_t>(x.size()) != d) {
        throw Error(ErrorCode::DimensionMismatch,
                    "measure " + std::to_string(i) + " has a point of dimension " +
                        std::to_string(x.size()) + ", expected " + std::to_string(d));
      }
    }
  }
  return d;
}

}  // namespace baryflow
