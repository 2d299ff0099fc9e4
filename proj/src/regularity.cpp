#include "gaussmlc/regularity.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "gaussmlc/report_io.hpp"

namespace gaussmlc {

namespace {

/// |tan angle(u, v)|; +inf when the angle is a right angle.
double abs_tan_angle(const UnitVector& u, const UnitVector& v) {
  const double theta = angle_between(u, v);
  const double c = std::cos(theta);
  if (std::abs(c) < 1e-300) return std::numeric_limits<double>::infinity();
  return std::abs(std::tan(theta));
}

}  // namespace

CriticalAngle critical_angle(const MlcWeights& W, int i, int j) {
  if (W.k < 3)
    throw PreconditionViolated("critical_angle: undefined for k = 2 (no third class)");
  const UnitVector w_ij = pairwise_boundary_direction(W, i, j);
  double min_tan = std::numeric_limits<double>::infinity();
  for (int r = 1; r <= W.k; ++r) {
    if (r == i || r == j) continue;
    min_tan = std::min(min_tan, abs_tan_angle(w_ij, pairwise_boundary_direction(W, i, r)));
    min_tan = std::min(min_tan, abs_tan_angle(w_ij, pairwise_boundary_direction(W, j, r)));
  }
  CriticalAngle out;
  out.theta_star = std::atan(min_tan);
  out.phi = std::min(min_tan, 1.0);
  return out;
}

MassEstimate boundary_mass_estimate(const MlcWeights& W, int i, int j, long n_mc,
                                    Rng& rng) {
  if (W.k < 3) throw PreconditionViolated("boundary_mass_estimate: k >= 3 required");
  if (n_mc < 1000) throw PreconditionViolated("boundary_mass_estimate: n_mc >= 1000");
  const UnitVector w_ij = pairwise_boundary_direction(W, i, j);
  std::vector<Eigen::VectorXd> constraints;
  for (int r = 1; r <= W.k; ++r) {
    if (r == i || r == j) continue;
    constraints.push_back(pairwise_boundary_direction(W, i, r).vec());
    constraints.push_back(pairwise_boundary_direction(W, j, r).vec());
  }
  long hits = 0;
  for (long s = 0; s < n_mc; ++s) {
    const Eigen::VectorXd z = sample_hyperplane_gaussian(w_ij, rng);
    bool ok = true;
    for (const auto& c : constraints)
      if (c.dot(z) < 0.0) {
        ok = false;
        break;
      }
    if (ok) ++hits;
  }
  MassEstimate est;
  est.n_mc = n_mc;
  est.t_hat = static_cast<double>(hits) / static_cast<double>(n_mc);
  est.ci_radius = 3.0 * std::sqrt(est.t_hat * (1.0 - est.t_hat) / n_mc);
  return est;
}

RegularityReport regularity_report(const MlcWeights& W, long n_mc, Rng& rng) {
  RegularityReport report;
  report.k = W.k;
  report.d = W.d;
  report.n_mc = n_mc;
  report.seed = rng.seed();
  for (int i = 1; i <= W.k; ++i)
    for (int j = i + 1; j <= W.k; ++j) {
      PairGeometry pg;
      pg.i = i;
      pg.j = j;
      if (W.k >= 3) {
        const MassEstimate mass = boundary_mass_estimate(W, i, j, n_mc, rng);
        pg.t_hat = mass.t_hat;
        pg.ci = mass.ci_radius;
        const CriticalAngle angle = critical_angle(W, i, j);
        pg.theta_star = angle.theta_star;
        pg.phi = angle.phi;
      } else {
        // k = 2: the full hyperplane is the boundary.
        pg.t_hat = 1.0;
        pg.ci = 0.0;
      }
      report.pairs.push_back(pg);
    }
  return report;
}

std::string regularity_to_json(const RegularityReport& report) {
  std::ostringstream out;
  out << "{\"k\":" << report.k << ",\"d\":" << report.d << ",\"pairs\":[";
  for (size_t p = 0; p < report.pairs.size(); ++p) {
    const auto& pg = report.pairs[p];
    if (p) out << ',';
    out << "{\"i\":" << pg.i << ",\"j\":" << pg.j << ",\"t_hat\":" << fmt17(pg.t_hat)
        << ",\"ci\":" << fmt17(pg.ci);
    if (pg.theta_star)
      out << ",\"theta_star\":" << fmt17(*pg.theta_star) << ",\"phi\":" << fmt17(*pg.phi);
    else
      out << ",\"theta_star\":null,\"phi\":null";
    out << '}';
  }
  out << "],\"seed\":" << report.seed << ",\"n_mc\":" << report.n_mc << "}";
  return out.str();
}

RegularitySummary random_mlc_regularity(int k, int d, int trials, long n_mc, Rng& rng) {
  if (trials < 1) throw PreconditionViolated("random_mlc_regularity: trials >= 1");
  RegularitySummary summary;
  summary.k = k;
  summary.d = d;
  summary.trials = trials;
  summary.n_mc = n_mc;
  summary.min_phi = std::numeric_limits<double>::infinity();
  summary.min_t_hat = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    Rng trial_rng = rng.derive(static_cast<std::uint64_t>(t));
    const MlcWeights W = MlcWeights::random_unit_rows(k, d, trial_rng);
    RegularityTrialSummary ts;
    ts.min_phi = std::numeric_limits<double>::infinity();
    ts.min_t_hat = std::numeric_limits<double>::infinity();
    if (k < 3) {
      // No third class: critical angles are undefined, nothing to minimize.
      ts.min_phi = std::numeric_limits<double>::quiet_NaN();
      ts.min_t_hat = 1.0;
    } else {
      for (int i = 1; i <= k; ++i)
        for (int j = i + 1; j <= k; ++j) {
          const CriticalAngle angle = critical_angle(W, i, j);
          const MassEstimate mass = boundary_mass_estimate(W, i, j, n_mc, trial_rng);
          ts.min_phi = std::min(ts.min_phi, angle.phi);
          if (mass.t_hat < ts.min_t_hat) {
            ts.min_t_hat = mass.t_hat;
            ts.min_t_ci = mass.ci_radius;
          }
        }
    }
    if (!(k < 3)) {
      summary.min_phi = std::min(summary.min_phi, ts.min_phi);
      summary.min_t_hat = std::min(summary.min_t_hat, ts.min_t_hat);
      if (ts.min_phi >= 1.0) ++summary.trials_with_phi_one;
    }
    summary.per_trial.push_back(ts);
  }
  return summary;
}

}  // namespace gaussmlc
