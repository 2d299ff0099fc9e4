#include "gaussmlc/metrics.hpp"

#include <cmath>

namespace gaussmlc {

ErrorReport make_error_report(long errors, long n) {
  if (n < 1) throw EmptySample("empty sample");
  ErrorReport r;
  r.n = n;
  r.value = static_cast<double>(errors) / static_cast<double>(n);
  r.std_err = std::sqrt(r.value * (1.0 - r.value) / static_cast<double>(n));
  return r;
}

ErrorReport err(const Classifier& h, const std::vector<LabeledExample>& sample) {
  if (sample.empty()) throw EmptySample("err: empty sample");
  long wrong = 0;
  for (const auto& ex : sample)
    if (h(ex.x) != ex.y) ++wrong;
  return make_error_report(wrong, static_cast<long>(sample.size()));
}

ErrorReport err_ij(const UnitVector& w, const std::vector<LabeledExample>& sample,
                   int i, int j) {
  if (i == j) throw PreconditionViolated("err_ij: i != j required");
  if (sample.empty()) throw EmptySample("err_ij: empty sample");
  long wrong = 0;
  for (const auto& ex : sample) {
    const double s = w.dot(ex.x);
    if ((s < 0.0 && ex.y == i) || (s > 0.0 && ex.y == j)) ++wrong;
  }
  return make_error_report(wrong, static_cast<long>(sample.size()));
}

ErrorReport err_ij_vs_model(const UnitVector& w, const MlcWeights& f_star, int i, int j,
                            long n_mc, Rng& rng) {
  if (i == j) throw PreconditionViolated("err_ij_vs_model: i != j required");
  if (n_mc < 1) throw EmptySample("err_ij_vs_model: n_mc >= 1");
  long wrong = 0;
  for (long s = 0; s < n_mc; ++s) {
    const Eigen::VectorXd x = rng.gaussian_vector(f_star.d);
    const double t = w.dot(x);
    const int y = mlc_predict(f_star, x);
    if ((t < 0.0 && y == i) || (t > 0.0 && y == j)) ++wrong;
  }
  return make_error_report(wrong, n_mc);
}

double ConfusionEstimate::o_ij(int i, int j) const {
  double total = 0.0;
  for (int a = 1; a <= k; ++a)
    for (int b = 1; b <= k; ++b) {
      if (a == b) continue;
      if (a == i || a == j || b == i || b == j) total += entries(a - 1, b - 1);
    }
  return total;
}

ConfusionEstimate confusion(const Classifier& f_star,
                            const std::vector<LabeledExample>& sample) {
  if (sample.empty()) throw EmptySample("confusion: empty sample");
  int k = 0;
  for (const auto& ex : sample) k = std::max(k, ex.y);
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(k, k);
  for (const auto& ex : sample) {
    const int a = f_star(ex.x);
    if (a < 1) throw PreconditionViolated("confusion: classifier label < 1");
    if (a > k) {
      counts.conservativeResizeLike(Eigen::MatrixXd::Zero(a, a));
      k = a;
    }
    if (a != ex.y) counts(a - 1, ex.y - 1) += 1.0;
  }
  ConfusionEstimate est;
  est.k = k;
  est.n = static_cast<long>(sample.size());
  est.entries = counts / static_cast<double>(sample.size());
  return est;
}

DecompositionResult decomposition_check(const PseudoMlcWeights& W,
                                        const std::vector<LabeledExample>& sample) {
  if (sample.empty()) throw EmptySample("decomposition_check: empty sample");
  const long n = static_cast<long>(sample.size());
  long wrong = 0;
  long bound_hits = 0;  // counts each (point, pair) mistake once
  for (const auto& ex : sample) {
    if (pseudo_predict(W, ex.x) != ex.y) ++wrong;
    for (int i = 1; i <= W.k; ++i)
      for (int j = i + 1; j <= W.k; ++j) {
        const double s = W.pair(i, j).dot(ex.x);
        if ((s < 0.0 && ex.y == i) || (s > 0.0 && ex.y == j)) ++bound_hits;
      }
  }
  DecompositionResult res;
  res.err_value = static_cast<double>(wrong) / n;
  res.pairwise_bound = static_cast<double>(bound_hits) / n;
  res.err_se = std::sqrt(res.err_value * (1.0 - res.err_value) / n);
  // bound is a sum of pair indicators; bound each pair term's variance crudely
  res.bound_se = std::sqrt(res.pairwise_bound / n);
  res.holds = res.err_value <= res.pairwise_bound + 2.0 * (res.err_se + res.bound_se);
  return res;
}

}  // namespace gaussmlc
