#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "gaussmlc/geometry.hpp"

namespace gaussmlc {

/// Labels are 1-based throughout, matching the class set {1, ..., k}.

/// f(x) = argmax_i w_i . x over k weight rows.
struct MlcWeights {
  int k = 0;
  int d = 0;
  std::vector<Eigen::VectorXd> rows;

  MlcWeights() = default;
  MlcWeights(int k_, int d_, std::vector<Eigen::VectorXd> rows_);

  /// k rows drawn uniformly from the unit sphere.
  static MlcWeights random_unit_rows(int k, int d, Rng& rng);
};

/// One unit normal per unordered pair (i < j), aggregated by tournament
/// voting. The vote of pair (j, i) for j > i uses w_ji := -w_ij.
struct PseudoMlcWeights {
  int k = 0;
  int d = 0;
  std::vector<UnitVector> pairs;  // i<j in lexicographic order

  PseudoMlcWeights() = default;
  PseudoMlcWeights(int k_, int d_, std::vector<UnitVector> pairs_);

  static int pair_index(int k, int i, int j);
  const UnitVector& pair(int i, int j) const;  // requires i < j

  /// w_ij . x with the sign convention w_ji = -w_ij; valid for any i != j.
  double oriented_score(int i, int j, const Eigen::VectorXd& x) const;
};

/// f(x) = min{ i in [k] : x_i > 0 }, equal to k when no coordinate of the
/// first k is positive.
struct HardInstanceSpec {
  int k = 0;
  int d = 0;

  HardInstanceSpec() = default;
  HardInstanceSpec(int k_, int d_);
};

/// Smallest index attaining the maximum score.
int mlc_predict(const MlcWeights& W, const Eigen::VectorXd& x);

/// Tournament prediction of Def. s_i(x) = #{j != i : w_ij . x >= 0};
/// smallest index attaining the maximum vote count.
int pseudo_predict(const PseudoMlcWeights& W, const Eigen::VectorXd& x);

/// (w_i - w_j) / ||w_i - w_j||; antisymmetric in (i, j).
UnitVector pairwise_boundary_direction(const MlcWeights& W, int i, int j);

int hard_instance_predict(const HardInstanceSpec& spec, const Eigen::VectorXd& x);

/// min_{j != y} (w_y . x - w_j . x) / ||x||.
double multiclass_margin(const MlcWeights& W, const Eigen::VectorXd& x, int y);

/// y (w . x) / ||x|| for y in {-1, +1}.
double binary_margin(const UnitVector& w, const Eigen::VectorXd& x, int y);

/// Runner-up class: the j != y attaining min (w_y - w_j) . x.
int runner_up_class(const MlcWeights& W, const Eigen::VectorXd& x, int y);

/// JSON round trip (17 significant digit reals, lossless for doubles).
std::string mlc_to_json(const MlcWeights& W);
std::string pseudo_to_json(const PseudoMlcWeights& W);
struct ModelFile {
  bool is_mlc = false;
  MlcWeights mlc;
  PseudoMlcWeights pseudo;
};
ModelFile model_from_json(const std::string& text);
void save_model_mlc(const MlcWeights& W, const std::string& path);
void save_model_pseudo(const PseudoMlcWeights& W, const std::string& path);
ModelFile load_model(const std::string& path);

}  // namespace gaussmlc
