#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gaussmlc/model.hpp"

namespace gaussmlc {

struct CriticalAngle {
  double theta_star = 0.0;  // radians
  double phi = 0.0;         // min{tan theta_star, 1}
};

/// Exact critical angle of the (i, j) boundary:
/// tan theta* = min over r not in {i,j} of min{|tan angle(w_ij*, w_ir*)|,
/// |tan angle(w_ij*, w_jr*)|}. Requires k >= 3.
CriticalAngle critical_angle(const MlcWeights& W, int i, int j);

struct MassEstimate {
  double t_hat = 0.0;
  double ci_radius = 0.0;  // 3 * sqrt(t(1-t)/n)
  long n_mc = 0;
};

/// Monte-Carlo Gaussian mass of the effective boundary B_ij within its
/// hyperplane: fraction of hyperplane-Gaussian samples z with
/// w_ir*.z >= 0 and w_jr*.z >= 0 for all r outside {i, j}.
MassEstimate boundary_mass_estimate(const MlcWeights& W, int i, int j, long n_mc,
                                    Rng& rng);

struct PairGeometry {
  int i = 0;
  int j = 0;
  double t_hat = 0.0;
  double ci = 0.0;
  // Unset for k = 2, where no third class defines a critical angle.
  std::optional<double> theta_star;
  std::optional<double> phi;
};

struct RegularityReport {
  int k = 0;
  int d = 0;
  long n_mc = 0;
  std::uint64_t seed = 0;
  std::vector<PairGeometry> pairs;
};

RegularityReport regularity_report(const MlcWeights& W, long n_mc, Rng& rng);

std::string regularity_to_json(const RegularityReport& report);

struct RegularityTrialSummary {
  double min_phi = 0.0;
  double min_t_hat = 0.0;
  double min_t_ci = 0.0;
};

struct RegularitySummary {
  int k = 0;
  int d = 0;
  int trials = 0;
  long n_mc = 0;
  std::vector<RegularityTrialSummary> per_trial;  // min over pairs, per trial
  int trials_with_phi_one = 0;
  double min_phi = 0.0;
  double min_t_hat = 0.0;
};

/// Samples `trials` random MLCs with unit-sphere rows and reports the worst
/// pair geometry per trial.
RegularitySummary random_mlc_regularity(int k, int d, int trials, long n_mc, Rng& rng);

}  // namespace gaussmlc
