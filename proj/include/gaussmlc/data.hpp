#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gaussmlc/model.hpp"

namespace gaussmlc {

enum class NoiseKind { none, uniform_flip, pair_confusion, boundary_flip };

std::string noise_kind_name(NoiseKind kind);
NoiseKind noise_kind_from_name(const std::string& name);

/// Label channel applied after the clean classifier. rate is the total flip
/// budget eta; every mode keeps Pr[y != f*(x)] <= eta (up to calibration
/// slack for boundary_flip), so opt <= eta is certified by construction.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::none;
  double rate = 0.0;
  std::optional<std::pair<int, int>> pair;  // pair_confusion only
  std::optional<double> band;               // boundary_flip only: margin band tau

  static NoiseSpec none_spec();
  static NoiseSpec uniform_flip(double eta);
  static NoiseSpec pair_confusion(int i, int j, double eta);
  static NoiseSpec boundary_flip(double eta, double tau);

  void validate(int k) const;
};

using GroundTruth = std::variant<MlcWeights, HardInstanceSpec>;

struct SourceConfig {
  int d = 0;
  int k = 0;
  GroundTruth truth;
  NoiseSpec noise;
  std::uint64_t seed = 0;
};

struct LabeledExample {
  Eigen::VectorXd x;
  int y;
};

int ground_truth_predict(const GroundTruth& truth, const Eigen::VectorXd& x);

/// Seeded stream of labeled examples with standard Gaussian x-marginal.
/// Single-owner state; parallel drawing goes through derived() clones.
class SampleSource {
 public:
  explicit SampleSource(SourceConfig cfg);

  LabeledExample draw_one();
  void draw_into(LabeledExample& ex);  // reuses the example's buffer
  std::vector<LabeledExample> draw(int n);

  /// Clone with an independent sub-seed; shares config and calibration.
  SampleSource derived(std::uint64_t tag) const;

  int k() const { return cfg_.k; }
  int d() const { return cfg_.d; }
  const SourceConfig& config() const { return cfg_; }
  int predict_clean(const Eigen::VectorXd& x) const;

  /// Estimated Pr[margin < tau] used by boundary_flip (nan otherwise).
  double band_mass() const { return band_mass_; }

 private:
  SourceConfig cfg_;
  Rng rng_;
  double band_mass_;

  int corrupt(int y_clean, const Eigen::VectorXd& x);
};

/// Text dataset: header `gauss-mlc-dataset v1 d=<d> k=<k>`, one `y x_1 .. x_d`
/// line per example, 17-significant-digit reals, LF endings.
void save_dataset(const std::vector<LabeledExample>& examples, int d, int k,
                  const std::string& path);

struct Dataset {
  int d = 0;
  int k = 0;
  std::vector<LabeledExample> examples;
};

Dataset load_dataset(const std::string& path);

}  // namespace gaussmlc
