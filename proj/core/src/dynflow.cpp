#include "baryflow/dynflow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "baryflow/error.hpp"
#include "baryflow/io.hpp"

namespace baryflow {
namespace {

void check_marginal(const ParticleFlow& flow, std::size_t i) {
  if (i >= flow.marginal_count()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "marginal " + std::to_string(i) + " of a flow with " +
                    std::to_string(flow.marginal_count()) + " marginals");
  }
}

void check_time(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorCode::TimeOutOfRange, "t = " + std::to_string(t) + " is outside [0, 1]");
  }
}

Eigen::VectorXd interpolate(const Eigen::VectorXd& from, const Eigen::VectorXd& to, double t) {
  return (1.0 - t) * from + t * to;
}

// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(order), 0.0);
  weights.assign(static_cast<std::size_t>(order), 0.0);
  for (int k = 0; k < order; ++k) {
    double x = std::cos(std::numbers::pi * (k + 0.75) / (order + 0.5));
    double dp = 1.0;
    for (int newton = 0; newton < 100; ++newton) {
      double p0 = 1.0;
      double p1 = x;
      for (int j = 2; j <= order; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[static_cast<std::size_t>(k)] = 0.5 * (1.0 - x);
    weights[static_cast<std::size_t>(k)] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

// All exponent vectors beta in N^d with |beta| <= max_total.
void multi_indices(std::size_t d, int max_total, std::vector<int>& current,
                   std::vector<std::vector<int>>& out) {
  if (current.size() == d) {
    out.push_back(current);
    return;
  }
  int used = 0;
  for (int b : current) used += b;
  for (int b = 0; used + b <= max_total; ++b) {
    current.push_back(b);
    multi_indices(d, max_total, current, out);
    current.pop_back();
  }
}

double ipow(double base, int e) {
  double r = 1.0;
  for (int k = 0; k < e; ++k) r *= base;
  return r;
}

double monomial(const Point& x, const std::vector<int>& beta) {
  double v = 1.0;
  for (std::size_t j = 0; j < beta.size(); ++j) v *= ipow(x[static_cast<Eigen::Index>(j)], beta[j]);
  return v;
}

// grad_x (x^beta) . v
double monomial_directional(const Point& x, const std::vector<int>& beta, const Point& v) {
  double total = 0.0;
  for (std::size_t j = 0; j < beta.size(); ++j) {
    if (beta[j] == 0) continue;
    double term = beta[j] * ipow(x[static_cast<Eigen::Index>(j)], beta[j] - 1);
    for (std::size_t l = 0; l < beta.size(); ++l) {
      if (l != j) term *= ipow(x[static_cast<Eigen::Index>(l)], beta[l]);
    }
    total += term * v[static_cast<Eigen::Index>(j)];
  }
  return total;
}

}  // namespace

ParticleFlow build_dc_flow(const MmotResult& res) {
  ParticleFlow flow;
  flow.p = res.p;
  flow.marginals = res.marginals;
  flow.barycenter = extract_barycenter(res);
  flow.particles.reserve(res.plan.entries.size());
  for (std::size_t e = 0; e < res.plan.entries.size(); ++e) {
    const PlanEntry& entry = res.plan.entries[e];
    Particle particle;
    particle.start = res.tuple_barycenters[e];
    particle.mass = entry.mass;
    particle.targets.reserve(entry.index.size());
    for (std::size_t k = 0; k < entry.index.size(); ++k) {
      particle.targets.push_back(res.marginals[k].point(entry.index[k]));
    }
    flow.particles.push_back(std::move(particle));
  }
  return flow;
}

Point position(const Particle& particle, std::size_t i, double t) {
  return interpolate(particle.start, particle.targets.at(i), t);
}

DiscreteMeasure snapshot(const ParticleFlow& flow, std::size_t i, double t) {
  check_marginal(flow, i);
  check_time(t);
  std::vector<Point> points;
  std::vector<double> weights;
  points.reserve(flow.particles.size());
  weights.reserve(flow.particles.size());
  for (const Particle& particle : flow.particles) {
    points.push_back(position(particle, i, t));
    weights.push_back(particle.mass);
  }
  return canonicalize(DiscreteMeasure(std::move(points), std::move(weights)));
}

double dc_action(const ParticleFlow& flow) {
  double total = 0.0;
  for (const Particle& particle : flow.particles) {
    double kinetic = 0.0;
    for (const Point& x : particle.targets) kinetic += cp(x - particle.start, flow.p);
    total += particle.mass * kinetic;
  }
  return total;
}

double velocity_sum_residual(const ParticleFlow& flow) {
  double worst = 0.0;
  for (const Particle& particle : flow.particles) {
    worst = std::max(worst, stationarity_residual(particle.targets, particle.start, flow.p));
  }
  return worst;
}

MomentumResidual momentum_sum_residual(const ParticleFlow& flow) {
  if (!flow.p.is_quadratic()) {
    throw Error(ErrorCode::WrongExponent,
                "momentum balance holds for p = 2 only, flow has p = " +
                    std::to_string(flow.p.value()));
  }
  MomentumResidual out;
  for (const Particle& particle : flow.particles) {
    Point velocity_sum = Point::Zero(particle.start.size());
    for (const Point& x : particle.targets) velocity_sum += x - particle.start;
    out.velocity = std::max(out.velocity, velocity_sum.norm());
    out.momentum = std::max(out.momentum, (particle.mass * velocity_sum).norm());
  }
  return out;
}

double continuity_residual(const ParticleFlow& flow, std::size_t i, int degree) {
  check_marginal(flow, i);
  if (degree < 0 || degree > 4) {
    throw Error(ErrorCode::InvalidProblem, "test-function degree must be in [0, 4]");
  }
  std::vector<double> nodes, weights;
  gauss_legendre(degree + 1, nodes, weights);

  const std::size_t d = flow.dim();
  const DiscreteMeasure& initial = flow.barycenter;
  const DiscreteMeasure& terminal = flow.marginals[i];

  double worst = 0.0;
  for (int a = 0; a <= degree; ++a) {
    std::vector<std::vector<int>> betas;
    std::vector<int> scratch;
    multi_indices(d, degree - a, scratch, betas);
    for (const auto& beta : betas) {
      double bulk = 0.0;
      for (std::size_t q = 0; q < nodes.size(); ++q) {
        const double t = nodes[q];
        const double time_factor = ipow(t, a);
        const double time_derivative = a == 0 ? 0.0 : a * ipow(t, a - 1);
        double integrand = 0.0;
        for (const Particle& particle : flow.particles) {
          const Point x = position(particle, i, t);
          const Point v = particle.targets[i] - particle.start;
          integrand += particle.mass * (time_derivative * monomial(x, beta) +
                                        time_factor * monomial_directional(x, beta, v));
        }
        bulk += weights[q] * integrand;
      }
      // phi(1, x) = x^beta and phi(0, x) = [a == 0] x^beta.
      double boundary = 0.0;
      for (std::size_t k = 0; k < terminal.size(); ++k) {
        boundary += terminal.weight(k) * monomial(terminal.point(k), beta);
      }
      if (a == 0) {
        for (std::size_t k = 0; k < initial.size(); ++k) {
          boundary -= initial.weight(k) * monomial(initial.point(k), beta);
        }
      }
      worst = std::max(worst, std::abs(bulk - boundary));
    }
  }
  return worst;
}

PsFlow build_ps_flow(const ParticleFlow& flow) {
  PsFlow ps;
  ps.p = flow.p;
  ps.marginal_count = flow.marginal_count();
  ps.dim = flow.dim();
  const auto d = static_cast<Eigen::Index>(ps.dim);
  const auto N = static_cast<Eigen::Index>(ps.marginal_count);
  ps.particles.reserve(flow.particles.size());
  for (const Particle& particle : flow.particles) {
    PsParticle out;
    out.start.resize(d * N);
    out.end.resize(d * N);
    for (Eigen::Index i = 0; i < N; ++i) {
      out.start.segment(i * d, d) = particle.start;
      out.end.segment(i * d, d) = particle.targets[static_cast<std::size_t>(i)];
    }
    out.mass = particle.mass;
    ps.particles.push_back(std::move(out));
  }
  return ps;
}

DiscreteMeasure ps_snapshot(const PsFlow& ps, double t) {
  check_time(t);
  std::vector<Point> points;
  std::vector<double> weights;
  for (const PsParticle& particle : ps.particles) {
    points.push_back(interpolate(particle.start, particle.end, t));
    weights.push_back(particle.mass);
  }
  return canonicalize(DiscreteMeasure(std::move(points), std::move(weights)));
}

DiscreteMeasure diagonal_coupling(const DiscreteMeasure& barycenter, std::size_t marginals) {
  const auto d = static_cast<Eigen::Index>(barycenter.dim());
  const auto N = static_cast<Eigen::Index>(marginals);
  return pushforward(barycenter, [d, N](const Point& y) {
    Point lifted(d * N);
    for (Eigen::Index i = 0; i < N; ++i) lifted.segment(i * d, d) = y;
    return lifted;
  });
}

DiscreteMeasure ps_marginal(const PsFlow& ps, std::size_t i, double t) {
  if (i >= ps.marginal_count) {
    throw Error(ErrorCode::IndexOutOfRange, "coupling block " + std::to_string(i));
  }
  check_time(t);
  const auto d = static_cast<Eigen::Index>(ps.dim);
  std::vector<Point> points;
  std::vector<double> weights;
  for (const PsParticle& particle : ps.particles) {
    const Eigen::VectorXd x = interpolate(particle.start, particle.end, t);
    points.push_back(x.segment(static_cast<Eigen::Index>(i) * d, d));
    weights.push_back(particle.mass);
  }
  return canonicalize(DiscreteMeasure(std::move(points), std::move(weights)));
}

double ps_action(const PsFlow& ps, const InfConvOptions& options) {
  const auto d = static_cast<Eigen::Index>(ps.dim);
  double total = 0.0;
  std::vector<Point> velocities(ps.marginal_count);
  for (const PsParticle& particle : ps.particles) {
    const Eigen::VectorXd v = particle.end - particle.start;
    for (std::size_t i = 0; i < ps.marginal_count; ++i) {
      velocities[i] = v.segment(static_cast<Eigen::Index>(i) * d, d);
    }
    total += particle.mass * infconv_cost(velocities, ps.p, options);
  }
  return total;
}

std::vector<double> frame_times(int k) {
  if (k < 2) throw Error(ErrorCode::InvalidProblem, "need at least 2 frames");
  std::vector<double> times(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) times[static_cast<std::size_t>(j)] = static_cast<double>(j) / (k - 1);
  return times;
}

void write_dc_frames(std::ostream& out, const ParticleFlow& flow,
                     std::span<const double> times) {
  const std::size_t d = flow.dim();
  out << "t,flow,particle,mass";
  for (std::size_t k = 1; k <= d; ++k) out << ",x_" << k;
  for (std::size_t k = 1; k <= d; ++k) out << ",v_" << k;
  out << '\n';
  for (double t : times) {
    check_time(t);
    for (std::size_t i = 0; i < flow.marginal_count(); ++i) {
      for (std::size_t j = 0; j < flow.particles.size(); ++j) {
        const Particle& particle = flow.particles[j];
        const Point x = position(particle, i, t);
        const Point v = particle.targets[i] - particle.start;
        out << format_number(t) << ',' << (i + 1) << ',' << j << ','
            << format_number(particle.mass);
        for (Eigen::Index k = 0; k < x.size(); ++k) out << ',' << format_number(x[k]);
        for (Eigen::Index k = 0; k < v.size(); ++k) out << ',' << format_number(v[k]);
        out << '\n';
      }
    }
  }
}

void write_ps_frames(std::ostream& out, const PsFlow& ps, std::span<const double> times) {
  const std::size_t dn = ps.dim * ps.marginal_count;
  out << "t,flow,particle,mass";
  for (std::size_t k = 1; k <= dn; ++k) out << ",x_" << k;
  for (std::size_t k = 1; k <= dn; ++k) out << ",v_" << k;
  out << '\n';
  for (double t : times) {
    check_time(t);
    for (std::size_t j = 0; j < ps.particles.size(); ++j) {
      const PsParticle& particle = ps.particles[j];
      const Eigen::VectorXd x = interpolate(particle.start, particle.end, t);
      const Eigen::VectorXd v = particle.end - particle.start;
      out << format_number(t) << ",ps," << j << ',' << format_number(particle.mass);
      for (Eigen::Index k = 0; k < x.size(); ++k) out << ',' << format_number(x[k]);
      for (Eigen::Index k = 0; k < v.size(); ++k) out << ',' << format_number(v[k]);
      out << '\n';
    }
  }
}

}  // namespace baryflow
