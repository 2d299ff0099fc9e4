#pragma once

#include <optional>
#include <vector>

#include "gaussmlc/data.hpp"

namespace gaussmlc {

struct CheckResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // lhs - rhs (with tolerance folded into pass)
  bool pass = false;
  long n_mc = 0;
  double std_err = 0.0;
};

/// Event S contained in {w.x >= 0} by construction: the cap itself, a wedge
/// cut by a second halfspace u.x >= 0 with u orthogonal to w, or a band
/// u.x in [lo, hi] on an orthogonal direction.
struct EventSpec {
  enum class Kind { halfspace_cap, wedge, band };
  Kind kind = Kind::halfspace_cap;
  std::optional<UnitVector> u;
  double lo = 0.0;
  double hi = 0.0;

  static EventSpec halfspace_cap();
  static EventSpec wedge(UnitVector u);
  static EventSpec band(UnitVector u, double lo, double hi);
};

/// Monte-Carlo check of E[(w.x) 1{x in S}] >= sqrt(pi/2) Pr[x in S]^2, with
/// three standard errors of slack. Validates u orthogonal to w.
CheckResult correlation_bound_check(const UnitVector& w, const EventSpec& event,
                                    long n_mc, Rng& rng);

/// Deterministic check of the projected-gradient progress inequality
/// ||w_{t+1} - w*||^2 <= ||w_t - w*||^2 - 2 mu g.w* + 2 mu ||g - g_hat||
///                      + mu^2 ||g_hat||^2, at tolerance 1e-9.
/// g and g_hat must be orthogonal to w_t.
CheckResult pgd_inequality_check(const UnitVector& w_star, const UnitVector& w_t,
                                 const Eigen::VectorXd& g_hat, const Eigen::VectorXd& g,
                                 double mu);

struct DisagreementResult {
  CheckResult check;
  double theta = 0.0;
  double first_order = 0.0;        // tan(theta) * MC integral of |u.z| over B_ij
  double second_order_scale = 0.0; // |estimate - first_order| / tan^2(theta)
};

/// Monte-Carlo Pr[(w_ij*.x)(w.x) < 0, f*(x) in {i, j}] under N(0, I) or the
/// localized Gaussian. For k = 2 without localization the estimate is checked
/// against the exact disagreement value theta/pi; otherwise the first-order
/// term is reported without a threshold (its hidden constants stay empirical).
DisagreementResult disagreement_mass(const MlcWeights& f_star, const UnitVector& w,
                                     int i, int j,
                                     const std::optional<LocalizationSpec>& localization,
                                     long n_mc, Rng& rng);

/// Hypothesis-checked test of the weight blow-up bound: if the separation
/// |w_{k-1,k} - w_{k,k}| >= c holds and every difference w_i - w_j (i < j)
/// is within angle eps of e_i, some row must satisfy
/// ||w_i|| >= c / (3 eps)^{k-1}. Throws HypothesisViolated when the premises
/// fail, naming the offending condition.
CheckResult weight_blowup_check(const std::vector<Eigen::VectorXd>& weights, double c,
                                double eps);

/// Ratio check for angle preservation under localization with
/// sigma = big_c * sin(angle(u, w)): computes the acute angle between the
/// localized images of u and v and passes iff
/// min{tan(theta~), 1} / (min{tan(theta), 1} / big_c) >= ratio_floor.
CheckResult localization_angle_check(const UnitVector& u, const UnitVector& v,
                                     const UnitVector& w, double big_c,
                                     double ratio_floor);

struct LowerboundRow {
  long n = 0;
  double median_err = 0.0;
  double frac_at_least = 0.0;  // fraction of trials with err >= eps / 2^{2l}
};

/// Multiclass perceptron on the hard instance (d = k), swept over the sample
/// schedule; per-cell error measured against the clean labels by Monte Carlo.
std::vector<LowerboundRow> perceptron_lowerbound_experiment(
    int k, int l, double eps, const std::vector<long>& n_schedule, int trials,
    Rng& rng, int threads = 1, long n_eval = 100000);

}  // namespace gaussmlc
