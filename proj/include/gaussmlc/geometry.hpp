#pragma once

#include <Eigen/Core>

#include "gaussmlc/errors.hpp"
#include "gaussmlc/rng.hpp"

namespace gaussmlc {

constexpr double kUnitNormTol = 1e-9;
constexpr double kZeroNormTol = 1e-12;

/// Unit vector on S^{d-1}; the constructor enforces | ||v|| - 1 | <= 1e-9.
class UnitVector {
 public:
  explicit UnitVector(Eigen::VectorXd v);

  const Eigen::VectorXd& vec() const { return v_; }
  int dim() const { return static_cast<int>(v_.size()); }
  double dot(const Eigen::VectorXd& x) const;

  UnitVector operator-() const;

 private:
  Eigen::VectorXd v_;
};

/// Band distribution N(0, I + (sigma^2 - 1) w w^T), sigma in (0, 1].
struct LocalizationSpec {
  UnitVector direction;
  double sigma;

  LocalizationSpec(UnitVector w, double s);
};

UnitVector normalize(const Eigen::VectorXd& v);

/// v - (v.w) w; the component of v orthogonal to w.
Eigen::VectorXd project_orthogonal(const Eigen::VectorXd& v, const UnitVector& w);

/// Angle in [0, pi], computed as atan2(||v - (v.u)u||, v.u) so it stays
/// accurate near 0 and pi where arccos of a clamped dot product loses digits.
double angle_between(const UnitVector& u, const UnitVector& v);

/// proj_{S^{d-1}}(w + mu g).
UnitVector sphere_retract(const UnitVector& w, double mu, const Eigen::VectorXd& g);

Eigen::VectorXd sample_gaussian(int d, Rng& rng);

/// Standard Gaussian on the hyperplane {x : w.x = 0}, law N(0, I - w w^T).
Eigen::VectorXd sample_hyperplane_gaussian(const UnitVector& w, Rng& rng);

/// exp(-(sigma^{-2} - 1)(w.x)^2 / 2).
double localized_accept_prob(const Eigen::VectorXd& x, const LocalizationSpec& spec);

/// Accepts iff u <= p(x); over x ~ N(0,I) the acceptance rate is sigma and
/// accepted samples have law N(0, I + (sigma^2 - 1) w w^T).
bool localized_accept(const Eigen::VectorXd& x, const LocalizationSpec& spec, double u);

/// Sigma^{1/2} z = z + (sigma - 1)(z.w) w.
Eigen::VectorXd apply_localization(const Eigen::VectorXd& z, const LocalizationSpec& spec);

struct BiasBounds {
  double lower;
  double upper;
};

/// Komatsu bounds on the Gaussian tail Q(t); for t < 0 the bracket is
/// obtained from 1 - Q(-t) by symmetry, so lower <= Q(t) <= upper holds for
/// every t.
BiasBounds halfspace_bias_bounds(double t);

/// High-accuracy Q(t) = Pr[N(0,1) > t] via erfc; oracle for tests and checks.
double gaussian_tail(double t);

}  // namespace gaussmlc
