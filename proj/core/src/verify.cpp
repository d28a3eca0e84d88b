#include "baryflow/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "baryflow/dynflow.hpp"

namespace baryflow {

bool VerificationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

std::optional<std::string> VerificationReport::first_failure() const {
  for (const CheckResult& c : checks) {
    if (!c.pass) return c.name;
  }
  return std::nullopt;
}

const CheckResult* VerificationReport::find(const std::string& name) const {
  for (const CheckResult& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

nlohmann::ordered_json to_json(const VerificationReport& report) {
  nlohmann::ordered_json j;
  j["p"] = report.p;
  j["marginals"] = report.marginal_count;
  j["dimension"] = report.dim;
  j["plan_size"] = report.plan_size;
  j["barycenter_size"] = report.barycenter_size;
  j["shift"] = std::vector<double>(report.shift.data(), report.shift.data() + report.shift.size());
  nlohmann::ordered_json values;
  values["C"] = report.values.C;
  values["WB"] = report.values.WB;
  values["DC"] = report.values.DC;
  values["PS"] = report.values.PS;
  j["infconv_tol"] = report.infconv_tol;
  j["values"] = std::move(values);
  const std::array<std::pair<const char*, double>, 4> named{
      {{"C", report.values.C}, {"WB", report.values.WB}, {"DC", report.values.DC},
       {"PS", report.values.PS}}};
  nlohmann::ordered_json differences;
  for (std::size_t a = 0; a < named.size(); ++a) {
    for (std::size_t b = a + 1; b < named.size(); ++b) {
      differences[std::string(named[a].first) + "-" + named[b].first] =
          named[a].second - named[b].second;
    }
  }
  j["differences"] = std::move(differences);
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const CheckResult& c : report.checks) {
    nlohmann::ordered_json row;
    row["name"] = c.name;
    row["residual"] = c.residual;
    row["tolerance"] = c.tolerance;
    row["status"] = c.pass ? "pass" : "fail";
    checks.push_back(std::move(row));
  }
  j["checks"] = std::move(checks);
  j["status"] = report.all_pass() ? "pass" : "fail";
  return j;
}

Point default_shift(std::size_t d) {
  Point xi(static_cast<Eigen::Index>(d));
  for (Eigen::Index k = 0; k < xi.size(); ++k) xi[k] = k % 2 == 0 ? 1.0 : -1.0;
  return xi;
}

double relative_spread(const ProblemValues& v) {
  const double hi = std::max({v.C, v.WB, v.DC, v.PS});
  const double lo = std::min({v.C, v.WB, v.DC, v.PS});
  return (hi - lo) / std::max(std::abs(v.C), kRelativeFloor);
}

namespace {

void add_check(VerificationReport& report, std::string name, double residual, double tolerance) {
  // NaN residuals fail.
  report.checks.push_back({std::move(name), residual, tolerance, residual <= tolerance});
}

}  // namespace

VerificationReport verify_instance(std::span<const DiscreteMeasure> mus, Exponent p,
                                   const VerifyOptions& options) {
  const MmotResult res = solve_mmot(mus, p, options.mmot);
  const DiscreteMeasure barycenter = extract_barycenter(res);
  const std::size_t N = mus.size();
  const double C = res.value;
  const double dual_scale = kDualTolerance * (1.0 + std::abs(C));

  VerificationReport report;
  report.p = p.value();
  report.marginal_count = N;
  report.dim = barycenter.dim();
  report.plan_size = res.plan.entries.size();
  report.barycenter_size = barycenter.size();
  report.shift = options.shift ? *options.shift : default_shift(report.dim);
  report.infconv_tol = options.mmot.infconv.tol;

  // Barycentre objective, keeping each pairwise solve for the duality checks.
  std::vector<PairwiseResult> pairwise;
  pairwise.reserve(N);
  double wb = 0.0;
  for (const DiscreteMeasure& mu : mus) {
    pairwise.push_back(solve_pairwise(barycenter, mu, p));
    wb += pairwise.back().value;
  }

  const ParticleFlow flow = build_dc_flow(res);
  const PsFlow ps = build_ps_flow(flow);
  report.values = {C, wb, dc_action(flow), ps_action(ps, options.mmot.infconv)};
  add_check(report, "value_spread", relative_spread(report.values), options.value_tol);

  add_check(report, "plan_marginals", marginal_error(res.plan, mus), kMarginalTolerance);

  double stationarity = 0.0;
  for (std::size_t e = 0; e < res.plan.entries.size(); ++e) {
    std::vector<Point> xs;
    for (std::size_t k = 0; k < N; ++k) xs.push_back(mus[k].point(res.plan.entries[e].index[k]));
    stationarity = std::max(stationarity, stationarity_residual(xs, res.tuple_barycenters[e], p));
  }
  add_check(report, "stationarity_max", stationarity, kStationarityTolerance);
  add_check(report, "velocity_sum", velocity_sum_residual(flow), kStationarityTolerance);
  if (p.is_quadratic()) {
    const MomentumResidual m = momentum_sum_residual(flow);
    add_check(report, "momentum", std::max(m.velocity, m.momentum), kMomentumTolerance);
  }

  double continuity = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    continuity = std::max(continuity, continuity_residual(flow, i, kContinuityDegree));
  }
  add_check(report, "continuity", continuity, kContinuityTolerance);

  double boundary = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    boundary = std::max(boundary, measure_discrepancy(snapshot(flow, i, 0.0), barycenter));
    boundary = std::max(boundary, measure_discrepancy(snapshot(flow, i, 1.0), mus[i]));
    boundary = std::max(boundary, measure_discrepancy(ps_marginal(ps, i, 1.0), mus[i]));
  }
  boundary = std::max(boundary, measure_discrepancy(ps_snapshot(ps, 0.0),
                                                    diagonal_coupling(barycenter, N)));
  add_check(report, "boundary_conditions", boundary, kMarginalTolerance);

  const DualReport duals = dual_feasibility_check(res);
  add_check(report, "dual_gap", duals.duality_gap, dual_scale);
  add_check(report, "dual_feasibility", duals.max_violation, dual_scale);
  add_check(report, "complementary_slackness", duals.max_slackness, dual_scale);

  // psi_i = phi_i^c on the barycentre: they sum to zero there, reproduce
  // W_p^p(nu_bar, mu_i) by duality, and are fixed by the double transform.
  const auto psis = barycenter_potentials(res, barycenter);
  double potential_sum = 0.0;
  for (std::size_t a = 0; a < barycenter.size(); ++a) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += psis[i][a];
    potential_sum = std::max(potential_sum, std::abs(s));
  }
  add_check(report, "potential_sum", potential_sum, dual_scale);

  double kantorovich = 0.0;
  double double_transform = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const auto psi_c = c_transform(psis[i], barycenter.points(), mus[i].points(), p);
    const auto psi_cc = c_transform(psi_c, mus[i].points(), barycenter.points(), p);
    double dual_value = 0.0;
    for (std::size_t a = 0; a < barycenter.size(); ++a) {
      dual_value += barycenter.weight(a) * psis[i][a];
      // Every barycentre atom is coupled to some x, so equality holds on all.
      double_transform = std::max(double_transform, std::abs(psi_cc[a] - psis[i][a]));
    }
    for (std::size_t b = 0; b < mus[i].size(); ++b) dual_value += mus[i].weight(b) * psi_c[b];
    kantorovich = std::max(kantorovich, std::abs(dual_value - pairwise[i].value));
  }
  add_check(report, "kantorovich_identity", kantorovich, dual_scale);
  add_check(report, "double_c_transform", double_transform, dual_scale);

  std::vector<DiscreteMeasure> shifted;
  shifted.reserve(N);
  for (const DiscreteMeasure& mu : mus) shifted.push_back(translate(mu, report.shift));
  const MmotResult moved = solve_mmot(shifted, p, options.mmot);
  add_check(report, "translation_invariance_value",
            std::abs(moved.value - C) / std::max(std::abs(C), kRelativeFloor),
            kTranslationValueTolerance);
  add_check(report, "translation_invariance_barycenter",
            measure_discrepancy(extract_barycenter(moved), translate(barycenter, report.shift)),
            kTranslationPointTolerance);
  return report;
}

}  // namespace baryflow
