#pragma once

#include <functional>
#include <optional>

#include "gaussmlc/metrics.hpp"

namespace gaussmlc {

/// theory: sample sizes straight from the analysis (impractical for small
/// epsilon); desk: empirically validated workstation-scale sizes. Every run
/// report carries the instantiated numbers.
enum class Preset { theory, desk };

enum class LearnerKind { init, local3, localk };

std::string learner_kind_name(LearnerKind kind);
LearnerKind learner_kind_from_name(const std::string& name);

struct TrainConfig {
  double epsilon = 0.05;
  double delta = 0.1;
  double big_c = 10.0;  // the constant C
  std::optional<long> n_override;            // total example budget per pairwise run
  std::optional<long> t_override;            // iterations per restart / grid cell
  std::optional<long> selection_n_override;  // fresh selection sample size
  Preset preset = Preset::desk;
  std::uint64_t seed = 0;
  int threads = 1;

  void validate() const;
};

/// Instantiated sizes for one pairwise run; logged into reports.
struct LearnerSizes {
  long n = 0;      // examples per gradient estimate
  long t = 0;      // iterations per restart / per grid cell
  long n_sel = 0;  // selection sample size
  int restarts = 1;
  double mu = 0.0;
  double eta_step = 0.0;     // localk: per-iteration phi decrement
  double phi0 = 0.0;         // localk: initial angle bound
  double sigma_floor = 0.0;  // localk: lower clamp on sigma_t
  double grid_step = 0.0;    // local3 sigma grid / localk geometry grid step
  double max_draw_factor = 100.0;
};

LearnerSizes compute_sizes(LearnerKind kind, const TrainConfig& cfg, int d);

struct IterateRecord {
  int block = 0;  // restart index (init) or grid-cell index (local3/localk)
  int t = 0;
  double sigma_t = 1.0;
  double phi_t = 0.0;
  Eigen::VectorXd w;
  Eigen::VectorXd g_hat;  // projected gradient used at w; empty on final iterates
  double grad_norm = 0.0;
  double val_err = -1.0;  // filled by selection
};

struct IterateTrace {
  std::vector<IterateRecord> records;
  int selected = -1;
  LearnerSizes sizes;
};

struct PairwiseResult {
  UnitVector w;
  IterateTrace trace;
  ErrorReport selection_err;
};

struct PerceptronResult {
  MlcWeights weights;
  long mistakes = 0;
};

/// Multiclass perceptron: Gaussian-initialized rows, two-row update on every
/// mistake, n online examples.
PerceptronResult perceptron_train(SampleSource& source, long n, Rng& init_rng);

/// Global pairwise PGD: restarts from uniform random unit vectors, fresh
/// batch per iteration, sphere retraction of the tangent gradient, final
/// iterate chosen by empirical err_ij on a fresh sample.
PairwiseResult pairwise_init_train(SampleSource source, int i, int j,
                                   const TrainConfig& cfg);

/// Localization learner for k = 3: sweeps a sigma grid, trains under
/// rejection sampling for each sigma, picks the per-sigma winner and then the
/// global winner by empirical err_ij.
PairwiseResult pairwise_local3_train(SampleSource source, int i, int j,
                                     const TrainConfig& cfg);

struct GeometryGuess {
  double t_hat = 0.0;
  double phi_hat = 0.0;
};

/// Localization learner for general k: warm start from the global learner at
/// epsilon/10, then localized PGD with a shrinking angle bound phi_t and
/// sigma_t = min{3 sin(phi_t)/sqrt(T_hat), 1}. With no oracle guess the
/// geometry parameters are gridded and the global empirical winner returned.
PairwiseResult pairwise_localk_train(SampleSource source, int i, int j,
                                     const TrainConfig& cfg,
                                     std::optional<GeometryGuess> oracle);

using GeometryOracle = std::function<GeometryGuess(int i, int j)>;

struct PairTrainReport {
  int i = 0;
  int j = 0;
  PairwiseResult result;
};

struct AggregateResult {
  PseudoMlcWeights weights;
  std::vector<PairTrainReport> pair_reports;
};

/// Trains every pair (i < j) at accuracy epsilon/k^2 and confidence
/// delta/k^2 on a derived sub-stream, then assembles the pseudo classifier.
/// Pairs run concurrently when cfg.threads > 1; results are independent of
/// scheduling because every pair derives its own seed.
AggregateResult aggregate_train(const SampleSource& source, const TrainConfig& cfg,
                                LearnerKind kind,
                                const GeometryOracle& oracle = nullptr);

struct SelectionOutcome {
  std::size_t index = 0;
  ErrorReport err;
  std::vector<double> all_errs;
};

/// Index of the candidate with minimum empirical err_ij on a fresh sample;
/// ties resolve to the smallest index.
SelectionOutcome hypothesis_select(const std::vector<UnitVector>& candidates,
                                   SampleSource& source, int i, int j, long n_sel);

/// Draws until n_accept examples pass the localized-accept coin; throws
/// AcceptanceStarvation past max_draw_factor * n_accept / sigma raw draws.
std::vector<LabeledExample> rejection_sample(SampleSource& source, long n_accept,
                                             const LocalizationSpec& spec, Rng& coin,
                                             double max_draw_factor = 100.0);

/// {step, 2*step, ...} intersected with (0, 1].
std::vector<double> sigma_grid(double step);

/// Runs fn(0..count-1) across the given number of worker threads.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace gaussmlc
