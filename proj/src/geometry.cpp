#include "gaussmlc/geometry.hpp"

#include <cmath>

namespace gaussmlc {

UnitVector::UnitVector(Eigen::VectorXd v) : v_(std::move(v)) {
  if (v_.size() < 1) throw DimensionMismatch("UnitVector: empty vector");
  const double n = v_.norm();
  if (!std::isfinite(n) || std::abs(n - 1.0) > kUnitNormTol)
    throw ZeroVector("UnitVector: norm " + std::to_string(n) + " is not 1");
}

double UnitVector::dot(const Eigen::VectorXd& x) const {
  if (x.size() != v_.size()) throw DimensionMismatch("UnitVector::dot");
  return v_.dot(x);
}

UnitVector UnitVector::operator-() const { return UnitVector(Eigen::VectorXd(-v_)); }

LocalizationSpec::LocalizationSpec(UnitVector w, double s)
    : direction(std::move(w)), sigma(s) {
  if (!(s > 0.0 && s <= 1.0))
    throw PreconditionViolated("LocalizationSpec: sigma must lie in (0, 1]");
}

UnitVector normalize(const Eigen::VectorXd& v) {
  const double n = v.norm();
  if (!(n >= kZeroNormTol)) throw ZeroVector("normalize: vanishing norm");
  return UnitVector(v / n);
}

Eigen::VectorXd project_orthogonal(const Eigen::VectorXd& v, const UnitVector& w) {
  if (v.size() != w.vec().size()) throw DimensionMismatch("project_orthogonal");
  return v - w.vec().dot(v) * w.vec();
}

double angle_between(const UnitVector& u, const UnitVector& v) {
  if (u.dim() != v.dim()) throw DimensionMismatch("angle_between");
  const double c = u.vec().dot(v.vec());
  const double s = (v.vec() - c * u.vec()).norm();
  return std::atan2(s, c);
}

UnitVector sphere_retract(const UnitVector& w, double mu, const Eigen::VectorXd& g) {
  if (g.size() != w.vec().size()) throw DimensionMismatch("sphere_retract");
  return normalize(w.vec() + mu * g);
}

Eigen::VectorXd sample_gaussian(int d, Rng& rng) { return rng.gaussian_vector(d); }

Eigen::VectorXd sample_hyperplane_gaussian(const UnitVector& w, Rng& rng) {
  Eigen::VectorXd z = rng.gaussian_vector(w.dim());
  return z - w.vec().dot(z) * w.vec();
}

double localized_accept_prob(const Eigen::VectorXd& x, const LocalizationSpec& spec) {
  const double t = spec.direction.dot(x);
  const double a = 1.0 / (spec.sigma * spec.sigma) - 1.0;
  return std::exp(-a * t * t / 2.0);
}

bool localized_accept(const Eigen::VectorXd& x, const LocalizationSpec& spec, double u) {
  return u <= localized_accept_prob(x, spec);
}

Eigen::VectorXd apply_localization(const Eigen::VectorXd& z, const LocalizationSpec& spec) {
  return z + (spec.sigma - 1.0) * spec.direction.dot(z) * spec.direction.vec();
}

namespace {

double komatsu_lower(double t) {
  return std::sqrt(2.0 / M_PI) * std::exp(-t * t / 2.0) / (t + std::sqrt(t * t + 4.0));
}

double komatsu_upper(double t) {
  return std::sqrt(2.0 / M_PI) * std::exp(-t * t / 2.0) / (t + std::sqrt(t * t + 2.0));
}

}  // namespace

BiasBounds halfspace_bias_bounds(double t) {
  if (t >= 0.0) return {komatsu_lower(t), komatsu_upper(t)};
  return {1.0 - komatsu_upper(-t), 1.0 - komatsu_lower(-t)};
}

double gaussian_tail(double t) { return 0.5 * std::erfc(t / std::sqrt(2.0)); }

}  // namespace gaussmlc
