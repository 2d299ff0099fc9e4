#pragma once

#include <Eigen/Dense>
#include <functional>

#include "gaussmlc/data.hpp"

namespace gaussmlc {

using Classifier = std::function<int(const Eigen::VectorXd&)>;

struct ErrorReport {
  double value = 0.0;
  long n = 0;
  double std_err = 0.0;
};

ErrorReport make_error_report(long errors, long n);

/// Empirical misclassification rate Pr[h(x) != y].
ErrorReport err(const Classifier& h, const std::vector<LabeledExample>& sample);

/// Empirical Pr[w.x < 0, y = i] + Pr[w.x > 0, y = j]; strict inequalities,
/// points on the hyperplane count for neither side.
ErrorReport err_ij(const UnitVector& w, const std::vector<LabeledExample>& sample,
                   int i, int j);

/// Monte-Carlo (i,j)-error against the clean model f*; no labels needed.
ErrorReport err_ij_vs_model(const UnitVector& w, const MlcWeights& f_star, int i, int j,
                            long n_mc, Rng& rng);

/// Entries opt_{a,b} = Pr[f*(x) = a, y = b] for a != b; diagonal is zero.
struct ConfusionEstimate {
  int k = 0;
  Eigen::MatrixXd entries;
  long n = 0;

  /// O_ij: total confusion mass touching {i, j}.
  double o_ij(int i, int j) const;
};

ConfusionEstimate confusion(const Classifier& f_star,
                            const std::vector<LabeledExample>& sample);

struct DecompositionResult {
  double err_value = 0.0;
  double pairwise_bound = 0.0;
  double err_se = 0.0;
  double bound_se = 0.0;
  bool holds = false;
};

/// Empirical check of the error-decomposition chain:
/// err(h_W) <= sum_{i<j} [Pr(w_ij.x < 0, y = i) + Pr(w_ij.x > 0, y = j)],
/// with two combined standard errors of slack.
DecompositionResult decomposition_check(const PseudoMlcWeights& W,
                                        const std::vector<LabeledExample>& sample);

}  // namespace gaussmlc
