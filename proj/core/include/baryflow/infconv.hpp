#pragma once

#include <span>

#include "baryflow/measure.hpp"

namespace baryflow {

/// Transport exponent p, restricted to 1 < p < infinity.
class Exponent {
 public:
  /// Throws InvalidExponent unless 1 < p < inf.
  explicit Exponent(double p);

  double value() const noexcept { return p_; }
  bool is_quadratic() const noexcept { return p_ == 2.0; }

  friend bool operator==(Exponent, Exponent) = default;

 private:
  double p_;
};

/// |x|^p
double cp(const Point& x, Exponent p);

/// Gradient of |x|^p, i.e. p |x|^{p-2} x, and 0 at x = 0.
Point grad_cp(const Point& x, Exponent p);

struct InfConvOptions {
  double tol = 1e-10;
  int max_iterations = 200;
};

struct InfConvResult {
  Point z_bar;
  /// sum_i |x_i - z_bar|^p
  double value = 0.0;
  /// || sum_i grad_cp(x_i - z_bar) ||
  double grad_norm = 0.0;
  /// grad_norm / (1 + sum_i |x_i - z_bar|^{p-1})
  double residual = 0.0;
  int iterations = 0;
};

/// Normalized first-order residual of z as a minimizer of sum_i |x_i - z|^p:
/// || sum_i grad_cp(x_i - z) || / (1 + sum_i |x_i - z|^{p-1}).
double stationarity_residual(std::span<const Point> xs, const Point& z, Exponent p);

/// Minimizer of z -> sum_i |x_i - z|^p and the minimum value.
///
/// p = 2 returns the mean directly. Otherwise a damped Newton iteration runs
/// from the mean until stationarity_residual <= tol; near-singular Hessians
/// fall back to a Weiszfeld-type reweighted mean, and iterates that land on
/// one of the x_i test that point directly. Throws NoConvergence when the
/// iteration budget runs out, DimensionMismatch / EmptyMeasure on bad input.
InfConvResult barycenter_point(std::span<const Point> xs, Exponent p,
                               const InfConvOptions& options = {});

/// The infimal convolution cost inf_z sum_i |x_i - z|^p.
double infconv_cost(std::span<const Point> xs, Exponent p,
                    const InfConvOptions& options = {});

}  // namespace baryflow
