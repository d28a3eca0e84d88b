#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "baryflow/infconv.hpp"
#include "baryflow/measure.hpp"
#include "baryflow/mmot.hpp"

namespace baryflow {

// Lagrangian form of the N coupled displacement interpolations that start
// from the barycentre. Every particle sits on one plan tuple: it starts at
// the tuple's barycentre point z and its i-th copy moves at constant speed
// along the straight line to x_i,
//
//   X_i(t) = (1 - t) z + t x_i,   velocity v_i = x_i - z.
//
// Storing trajectories per tuple (instead of velocity fields per measure)
// keeps every identity exact even when mass splits and no Monge map exists.

struct Particle {
  Point start;
  std::vector<Point> targets;
  double mass = 0.0;
};

struct ParticleFlow {
  Exponent p{2.0};
  std::vector<Particle> particles;
  /// Declared endpoint measures: the barycentre and mu_1..mu_N.
  DiscreteMeasure barycenter;
  std::vector<DiscreteMeasure> marginals;

  std::size_t marginal_count() const noexcept { return marginals.size(); }
  std::size_t dim() const noexcept { return barycenter.dim(); }
};

/// One particle per plan entry, z = z_bar of the tuple.
ParticleFlow build_dc_flow(const MmotResult& res);

/// Position of marginal i's copy of `particle` at time t.
Point position(const Particle& particle, std::size_t i, double t);

/// rho^i_t: atoms at (1 - t) z + t x_i with the particle masses, canonicalized.
/// Throws IndexOutOfRange or TimeOutOfRange.
DiscreteMeasure snapshot(const ParticleFlow& flow, std::size_t i, double t);

/// sum_i int_0^1 int |v^i_t|^p d rho^i_t dt. Speeds are constant along
/// particles, so this is exactly sum_particles mass * sum_i |x_i - z|^p.
double dc_action(const ParticleFlow& flow);

/// max over particles of the normalized || sum_i grad_cp(x_i - z) ||.
double velocity_sum_residual(const ParticleFlow& flow);

struct MomentumResidual {
  /// max over particles of || sum_i (x_i - z) ||
  double velocity = 0.0;
  /// max over particles of || sum_i mass * (x_i - z) ||
  double momentum = 0.0;
};

/// Only meaningful for p = 2; throws WrongExponent otherwise.
MomentumResidual momentum_sum_residual(const ParticleFlow& flow);

/// Weak-form residual of the continuity equation for marginal i, tested
/// against every monomial t^a x^beta with a + |beta| <= degree (degree <= 4).
/// The time integral uses Gauss-Legendre quadrature with degree + 1 nodes,
/// exact here because trajectories are affine in t. Boundary terms come from
/// the declared barycentre and marginal, not from the particles.
double continuity_residual(const ParticleFlow& flow, std::size_t i, int degree);

/// The coupling flow on R^{dN}: each particle moves from (z, ..., z) to
/// (x_1, ..., x_N) with velocity (x_1 - z, ..., x_N - z).
struct PsParticle {
  Eigen::VectorXd start;
  Eigen::VectorXd end;
  double mass = 0.0;
};

struct PsFlow {
  Exponent p{2.0};
  std::size_t marginal_count = 0;
  std::size_t dim = 0;
  std::vector<PsParticle> particles;
};

PsFlow build_ps_flow(const ParticleFlow& flow);

/// gamma_t = (S_t)_# omega on R^{dN}, canonicalized.
DiscreteMeasure ps_snapshot(const PsFlow& ps, double t);

/// omega = (id x ... x id)_# nu_bar on R^{dN}.
DiscreteMeasure diagonal_coupling(const DiscreteMeasure& barycenter, std::size_t marginals);

/// i-th coordinate block of the coupling gamma_t (the measure pi^i_# gamma_t).
DiscreteMeasure ps_marginal(const PsFlow& ps, std::size_t i, double t);

/// int_0^1 int c(V_t) d gamma_t dt = sum_particles mass * c(v_1, ..., v_N),
/// with c evaluated by the inner minimization.
double ps_action(const PsFlow& ps, const InfConvOptions& options = {});

/// Frame CSV: header "t,flow,particle,mass,x_1,...,x_d,v_1,...,v_d"; one row
/// per (time, marginal, particle). `flow` is the 1-based marginal index.
void write_dc_frames(std::ostream& out, const ParticleFlow& flow,
                     std::span<const double> times);

/// Same layout for the coupling flow, with coordinates in R^{dN} and
/// `flow` = "ps".
void write_ps_frames(std::ostream& out, const PsFlow& ps, std::span<const double> times);

/// k equally spaced times 0, 1/(k-1), ..., 1. Throws InvalidProblem if k < 2.
std::vector<double> frame_times(int k);

}  // namespace baryflow
