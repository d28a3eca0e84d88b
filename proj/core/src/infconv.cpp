#include "baryflow/infconv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>

#include "baryflow/error.hpp"

namespace baryflow {

Exponent::Exponent(double p) : p_(p) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw Error(ErrorCode::InvalidExponent,
                "p must satisfy 1 < p < inf, got " + std::to_string(p));
  }
}

double cp(const Point& x, Exponent p) {
  if (p.is_quadratic()) return x.squaredNorm();
  return std::pow(x.norm(), p.value());
}

Point grad_cp(const Point& x, Exponent p) {
  const double r = x.norm();
  if (r == 0.0) return Point::Zero(x.size());
  if (p.is_quadratic()) return 2.0 * x;
  return p.value() * std::pow(r, p.value() - 2.0) * x;
}

namespace {

// Iterates this close to a data point are snapped onto it.
constexpr double kCoincidenceRadius = 1e-12;
// Relative reciprocal condition below which Newton gives way to Weiszfeld.
constexpr double kMinHessianConditioning = 1e-14;

struct Evaluation {
  Point gradient_sum;  // sum_i grad_cp(x_i - z)
  double value = 0.0;
  double scale = 1.0;  // 1 + sum_i |x_i - z|^{p-1}

  double residual() const { return gradient_sum.norm() / scale; }
};

Evaluation evaluate(std::span<const Point> xs, const Point& z, Exponent p) {
  Evaluation e;
  e.gradient_sum = Point::Zero(z.size());
  for (const Point& x : xs) {
    const Point r = x - z;
    const double len = r.norm();
    if (len == 0.0) continue;
    const double pm1 = std::pow(len, p.value() - 1.0);
    e.value += pm1 * len;
    e.scale += pm1;
    e.gradient_sum += (p.value() * pm1 / len) * r;
  }
  return e;
}

void check_points(std::span<const Point> xs) {
  if (xs.empty()) throw Error(ErrorCode::EmptyMeasure, "barycenter_point needs N >= 1");
  const Eigen::Index d = xs.front().size();
  for (const Point& x : xs) {
    if (x.size() != d) throw Error(ErrorCode::DimensionMismatch, "points differ in dimension");
  }
}

InfConvResult finish(std::span<const Point> xs, Point z, Exponent p, int iterations) {
  const Evaluation e = evaluate(xs, z, p);
  InfConvResult out;
  out.z_bar = std::move(z);
  out.value = e.value;
  out.grad_norm = e.gradient_sum.norm();
  out.residual = e.residual();
  out.iterations = iterations;
  return out;
}

// Descent step for f(z) = sum |x_i - z|^p. grad f = -gradient_sum.
Point newton_direction(std::span<const Point> xs, const Point& z, Exponent p,
                       const Point& gradient_sum) {
  const Eigen::Index d = z.size();
  const double pv = p.value();
  Eigen::MatrixXd hessian = Eigen::MatrixXd::Zero(d, d);
  double weight_sum = 0.0;
  Point weighted = Point::Zero(d);
  for (const Point& x : xs) {
    const Point r = x - z;
    const double len = r.norm();
    if (len == 0.0) continue;
    const double w = pv * std::pow(len, pv - 2.0);
    const Point u = r / len;
    hessian.noalias() += w * (Eigen::MatrixXd::Identity(d, d) + (pv - 2.0) * u * u.transpose());
    weight_sum += w;
    weighted += w * x;
  }

  Eigen::LDLT<Eigen::MatrixXd> ldlt(hessian);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive() && hessian.allFinite()) {
    const double max_diag = ldlt.vectorD().maxCoeff();
    const double min_diag = ldlt.vectorD().minCoeff();
    if (max_diag > 0.0 && min_diag > kMinHessianConditioning * max_diag) {
      return ldlt.solve(gradient_sum);
    }
  }
  // Weiszfeld-type fixed point: the stationarity condition reads
  // sum_i w_i (x_i - z) = 0 with w_i = |x_i - z|^{p-2}.
  if (weight_sum <= 0.0 || !std::isfinite(weight_sum)) return Point::Zero(d);
  return weighted / weight_sum - z;
}

}  // namespace

double stationarity_residual(std::span<const Point> xs, const Point& z, Exponent p) {
  return evaluate(xs, z, p).residual();
}

InfConvResult barycenter_point(std::span<const Point> xs, Exponent p,
                               const InfConvOptions& options) {
  check_points(xs);
  const Eigen::Index d = xs.front().size();

  // Mean, accumulated relative to the first point so that coincident points
  // reproduce that point exactly.
  Point offset = Point::Zero(d);
  for (const Point& x : xs) offset += x - xs.front();
  Point z = xs.front() + offset / static_cast<double>(xs.size());
  if (p.is_quadratic() || xs.size() == 1) return finish(xs, std::move(z), p, 0);

  Evaluation current = evaluate(xs, z, p);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (current.residual() <= options.tol) {
      // Newton converges quadratically; a couple of extra steps that keep
      // reducing the gradient make z_bar accurate well past the tolerance.
      for (int polish = 0; polish < 2; ++polish) {
        const Point step = newton_direction(xs, z, p, current.gradient_sum);
        const Point candidate = z + step;
        const Evaluation next = evaluate(xs, candidate, p);
        if (!(next.gradient_sum.norm() < current.gradient_sum.norm())) break;
        z = candidate;
        current = next;
      }
      return finish(xs, std::move(z), p, iter);
    }

    // Near a data point the Hessian of |x_i - z|^p blows up for p < 2.
    // Test the data point itself, otherwise move off it along -grad f.
    for (const Point& x : xs) {
      if ((x - z).norm() >= kCoincidenceRadius || (x - z).norm() == 0.0) continue;
      const Evaluation at_point = evaluate(xs, x, p);
      if (at_point.residual() <= options.tol) return finish(xs, x, p, iter + 1);
    }

    Point step = newton_direction(xs, z, p, current.gradient_sum);
    if (!step.allFinite() || step.norm() == 0.0) step = current.gradient_sum / current.scale;

    // Accept a step that lowers f, or that keeps f within rounding of its
    // current value while shrinking the gradient; close to the minimizer f
    // stops resolving progress long before the gradient does.
    const auto acceptable = [&](const Evaluation& next) {
      if (next.value < current.value) return true;
      const double slack = 8.0 * std::numeric_limits<double>::epsilon() * current.value;
      return next.value <= current.value + slack &&
             next.gradient_sum.norm() < current.gradient_sum.norm();
    };
    double t = 1.0;
    Point candidate = z + step;
    Evaluation next = evaluate(xs, candidate, p);
    while (!acceptable(next) && t > 1e-20) {
      t *= 0.5;
      candidate = z + t * step;
      next = evaluate(xs, candidate, p);
    }
    if (!acceptable(next) || candidate == z) break;
    z = std::move(candidate);
    current = next;
  }
  if (current.residual() <= options.tol) return finish(xs, std::move(z), p, options.max_iterations);
  throw Error(ErrorCode::NoConvergence,
              "inner minimization stopped with residual " +
                  std::to_string(current.residual()) + " > tol " +
                  std::to_string(options.tol));
}

double infconv_cost(std::span<const Point> xs, Exponent p, const InfConvOptions& options) {
  return barycenter_point(xs, p, options).value;
}

}  // namespace baryflow
