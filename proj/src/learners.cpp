#include "gaussmlc/learners.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

namespace gaussmlc {

namespace {

constexpr double kDeskEpsFloor = 0.2;
constexpr double kDeskSigmaFloor = 0.08;
constexpr long kDeskSelectionN = 10000;
constexpr long kDeskInitNCap = 2500;
constexpr long kDeskLocalNCap = 1200;

std::uint64_t pair_tag(int i, int j, int algo) {
  return (static_cast<std::uint64_t>(algo) << 40) ^
         (static_cast<std::uint64_t>(i) << 20) ^ static_cast<std::uint64_t>(j);
}

double ln2_over(double delta) { return std::log(2.0 / delta); }

}  // namespace

std::string learner_kind_name(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::init: return "init";
    case LearnerKind::local3: return "local3";
    case LearnerKind::localk: return "localk";
  }
  throw ConfigError("unknown learner kind");
}

LearnerKind learner_kind_from_name(const std::string& name) {
  if (name == "init") return LearnerKind::init;
  if (name == "local3") return LearnerKind::local3;
  if (name == "localk") return LearnerKind::localk;
  throw ConfigError("unknown learner kind: " + name);
}

void TrainConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw PreconditionViolated("TrainConfig: epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0))
    throw PreconditionViolated("TrainConfig: delta must lie in (0, 1)");
  if (!(big_c >= 2.0)) throw PreconditionViolated("TrainConfig: big_c >= 2 required");
  if (threads < 1) throw PreconditionViolated("TrainConfig: threads >= 1");
}

LearnerSizes compute_sizes(LearnerKind kind, const TrainConfig& cfg, int d) {
  cfg.validate();
  const double eps = cfg.epsilon;
  const double C = cfg.big_c;
  LearnerSizes s;
  if (cfg.preset == Preset::theory) {
    s.restarts = static_cast<int>(std::ceil(std::log2(3.0 / cfg.delta)));
    switch (kind) {
      case LearnerKind::init:
        s.n = static_cast<long>(std::ceil(4.0 * d * ln2_over(cfg.delta) / std::pow(eps, 6)));
        s.t = static_cast<long>(std::ceil(4.0 * C / std::pow(eps, 6)));
        s.mu = eps * eps / C;
        break;
      case LearnerKind::local3:
        s.n = static_cast<long>(std::ceil(16.0 * d * ln2_over(cfg.delta) / std::pow(eps, 4)));
        s.t = static_cast<long>(std::ceil(4.0 * C / (eps * eps)));
        s.mu = eps / C;
        s.grid_step = eps;
        break;
      case LearnerKind::localk:
        s.n = static_cast<long>(std::ceil(4.0 * d * ln2_over(cfg.delta) / std::pow(eps, 6)));
        s.t = static_cast<long>(std::ceil(4.0 * C / std::pow(eps, 6)));  // + 2*phi0/eps^3 at run time
        s.mu = std::pow(eps, 3) / C;
        s.sigma_floor = 0.0;
        s.grid_step = eps;
        break;
    }
    s.n_sel = s.n;
  } else {
    // Desk scale: the theory exponents stall below eps ~ 0.2, so sizes are
    // driven by the floored accuracy and validated empirically; all values
    // land in the run report.
    const double eps_d = std::max(eps, kDeskEpsFloor);
    s.mu = eps_d / C;
    s.restarts = std::min<int>(
        2, static_cast<int>(std::ceil(std::log2(3.0 / cfg.delta))));
    switch (kind) {
      case LearnerKind::init:
        s.n = std::min<long>(
            kDeskInitNCap,
            static_cast<long>(std::ceil(4.0 * d * ln2_over(cfg.delta) / eps_d)));
        s.t = static_cast<long>(std::ceil(30.0 * C / eps_d));
        break;
      case LearnerKind::local3:
        s.n = std::min<long>(
            kDeskLocalNCap,
            static_cast<long>(std::ceil(2.0 * d * ln2_over(cfg.delta) / eps_d)));
        s.t = static_cast<long>(std::ceil(16.0 * C / eps_d));
        s.grid_step = eps_d;
        break;
      case LearnerKind::localk:
        s.n = std::min<long>(
            kDeskLocalNCap,
            static_cast<long>(std::ceil(2.0 * d * ln2_over(cfg.delta) / eps_d)));
        s.t = static_cast<long>(std::ceil(10.0 * C / eps_d));
        s.sigma_floor = kDeskSigmaFloor;
        s.grid_step = std::max(eps_d, 1.0 / 3.0);  // caps the geometry grid at 9 cells
        break;
    }
    s.n_sel = kDeskSelectionN;
  }
  if (kind == LearnerKind::init) s.grid_step = 0.0;
  if (cfg.t_override) s.t = *cfg.t_override;
  if (cfg.selection_n_override) s.n_sel = *cfg.selection_n_override;
  return s;
}

namespace {

// Spreads a total example budget over the gradient blocks and the selection
// pass: a quarter goes to selection, the rest is split evenly per iteration.
void apply_budget(LearnerSizes& s, long budget, int blocks) {
  s.restarts = 1;
  s.n_sel = std::max<long>(100, budget / 4);
  const long per_block = std::max<long>(1, (budget - s.n_sel) / std::max(1, blocks));
  s.n = std::max<long>(16, per_block / std::max<long>(1, s.t));
}

}  // namespace

std::vector<double> sigma_grid(double step) {
  std::vector<double> grid;
  const int count = static_cast<int>(std::ceil(1.0 / step - 1e-12));
  for (int l = 1; l <= count; ++l) {
    double v = l * step;
    if (v > 1.0 + 1e-9) break;
    if (std::abs(v - 1.0) < 1e-9) v = 1.0;
    grid.push_back(v);
  }
  return grid;
}

std::vector<LabeledExample> rejection_sample(SampleSource& source, long n_accept,
                                             const LocalizationSpec& spec, Rng& coin,
                                             double max_draw_factor) {
  std::vector<LabeledExample> out;
  out.reserve(n_accept);
  const long cap = static_cast<long>(
      std::ceil(max_draw_factor * static_cast<double>(n_accept) / spec.sigma));
  long draws = 0;
  LabeledExample ex;
  while (static_cast<long>(out.size()) < n_accept) {
    if (draws >= cap)
      throw AcceptanceStarvation("rejection sampling exceeded draw cap at sigma=" +
                                 std::to_string(spec.sigma));
    source.draw_into(ex);
    ++draws;
    if (localized_accept(ex.x, spec, coin.uniform01())) out.push_back(ex);
  }
  return out;
}

namespace {

/// v_hat = (1/N) sum x (1{y=i, w.x <= 0} - 1{y=j, w.x >= 0}); when loc is
/// set, only rejection-accepted draws count toward N.
Eigen::VectorXd gradient_batch(SampleSource& src, long n, int i, int j,
                               const UnitVector& w, const LocalizationSpec* loc,
                               Rng* coin, double max_draw_factor) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(w.dim());
  LabeledExample ex;
  long accepted = 0;
  long draws = 0;
  const long cap = loc ? static_cast<long>(std::ceil(
                             max_draw_factor * static_cast<double>(n) / loc->sigma))
                       : 0;
  while (accepted < n) {
    if (loc && draws >= cap)
      throw AcceptanceStarvation("rejection sampling exceeded draw cap at sigma=" +
                                 std::to_string(loc->sigma));
    src.draw_into(ex);
    ++draws;
    if (loc && !localized_accept(ex.x, *loc, coin->uniform01())) continue;
    ++accepted;
    const double s = w.dot(ex.x);
    if (ex.y == i && s <= 0.0)
      sum += ex.x;
    else if (ex.y == j && s >= 0.0)
      sum -= ex.x;
  }
  return sum / static_cast<double>(n);
}

struct SelectionSample {
  Eigen::MatrixXd x;  // n x d
  std::vector<int> y;
};

SelectionSample draw_selection_sample(SampleSource& src, long n, int d) {
  SelectionSample s;
  s.x.resize(n, d);
  s.y.resize(n);
  LabeledExample ex;
  for (long r = 0; r < n; ++r) {
    src.draw_into(ex);
    s.x.row(r) = ex.x;
    s.y[r] = ex.y;
  }
  return s;
}

double sample_err_ij(const SelectionSample& s, const Eigen::VectorXd& w, int i, int j) {
  const Eigen::VectorXd scores = s.x * w;
  long wrong = 0;
  for (long r = 0; r < scores.size(); ++r)
    if ((scores[r] < 0.0 && s.y[r] == i) || (scores[r] > 0.0 && s.y[r] == j)) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(scores.size());
}

/// Fills val_err for records [begin, end) and returns the argmin (ties to
/// the smallest index); records with block < 0 are warm-start bookkeeping
/// and are skipped. Candidates are scored in blocks so the dot products run
/// as one matrix product per block.
int selection_pass(std::vector<IterateRecord>& records, int begin, int end,
                   const SelectionSample& sample, int i, int j) {
  constexpr int kBlock = 128;
  const int d = static_cast<int>(sample.x.cols());
  const long n = sample.x.rows();
  std::vector<int> idx;
  for (int r = begin; r < end; ++r)
    if (records[r].block >= 0) idx.push_back(r);
  Eigen::MatrixXd w_block(d, kBlock);
  Eigen::MatrixXd scores(n, kBlock);
  for (std::size_t start = 0; start < idx.size(); start += kBlock) {
    const int width = static_cast<int>(std::min<std::size_t>(kBlock, idx.size() - start));
    for (int c = 0; c < width; ++c) w_block.col(c) = records[idx[start + c]].w;
    scores.leftCols(width).noalias() = sample.x * w_block.leftCols(width);
    for (int c = 0; c < width; ++c) {
      long wrong = 0;
      const double* col = scores.col(c).data();
      for (long r = 0; r < n; ++r)
        if ((col[r] < 0.0 && sample.y[r] == i) || (col[r] > 0.0 && sample.y[r] == j))
          ++wrong;
      records[idx[start + c]].val_err = static_cast<double>(wrong) / static_cast<double>(n);
    }
  }
  int best = -1;
  for (int r : idx)
    if (best < 0 || records[r].val_err < records[best].val_err) best = r;
  return best;
}

struct BlockSchedule {
  int block = 0;
  double sigma_fixed = -1.0;  // local3: constant sigma; <0 means no localization
  double t_hat = 0.0;         // localk sigma formula
  double phi0 = 0.0;
  double eta_step = 0.0;
  double sigma_floor = 0.0;
};

/// One PGD block: T iterations from w0, recording every iterate. Returns the
/// index range of the new records.
std::pair<int, int> run_block(SampleSource& src, int i, int j, const LearnerSizes& sizes,
                              const BlockSchedule& sched, const UnitVector& w0,
                              Rng& coin, std::vector<IterateRecord>& records) {
  const int begin = static_cast<int>(records.size());
  UnitVector w = w0;
  double phi = sched.phi0;
  const bool localk_mode = sched.t_hat > 0.0;
  for (long t = 0; t <= sizes.t; ++t) {
    IterateRecord rec;
    rec.block = sched.block;
    rec.t = static_cast<int>(t);
    rec.w = w.vec();
    rec.phi_t = localk_mode ? phi : 0.0;

    double sigma = 1.0;
    if (localk_mode)
      // The 1e-3 guard keeps sigma positive after phi reaches 0.
      sigma = std::clamp(3.0 * std::sin(phi) / std::sqrt(sched.t_hat),
                         std::max(sched.sigma_floor, 1e-3), 1.0);
    else if (sched.sigma_fixed > 0.0)
      sigma = sched.sigma_fixed;
    rec.sigma_t = sigma;

    if (t == sizes.t) {  // final iterate: logged, no update
      records.push_back(std::move(rec));
      break;
    }

    const bool localized = sigma < 1.0;
    LocalizationSpec loc = LocalizationSpec(w, localized ? sigma : 1.0);
    const Eigen::VectorXd v_hat =
        gradient_batch(src, sizes.n, i, j, w, localized ? &loc : nullptr, &coin,
                       sizes.max_draw_factor);
    Eigen::VectorXd g_hat = project_orthogonal(v_hat, w);
    rec.grad_norm = g_hat.norm();
    rec.g_hat = g_hat;
    records.push_back(std::move(rec));

    w = sphere_retract(w, sizes.mu, g_hat);
    if (localk_mode) phi = std::max(0.0, phi - sched.eta_step);
  }
  return {begin, static_cast<int>(records.size())};
}

PairwiseResult finish(std::vector<IterateRecord> records, int best,
                      LearnerSizes sizes, long n_sel) {
  if (best < 0) throw EmptyCandidates("pairwise training produced no candidates");
  IterateTrace trace;
  trace.records = std::move(records);
  trace.selected = best;
  trace.sizes = sizes;
  PairwiseResult out{UnitVector(trace.records[best].w), std::move(trace), {}};
  long wrong = std::lround(out.trace.records[best].val_err * n_sel);
  out.selection_err = make_error_report(wrong, n_sel);
  return out;
}

}  // namespace

PerceptronResult perceptron_train(SampleSource& source, long n, Rng& init_rng) {
  const int k = source.k();
  const int d = source.d();
  std::vector<Eigen::VectorXd> rows;
  rows.reserve(k);
  for (int i = 0; i < k; ++i) rows.push_back(init_rng.gaussian_vector(d));
  long mistakes = 0;
  LabeledExample ex;
  for (long s = 0; s < n; ++s) {
    source.draw_into(ex);
    int pred = 1;
    double best = rows[0].dot(ex.x);
    for (int i = 2; i <= k; ++i) {
      const double sc = rows[i - 1].dot(ex.x);
      if (sc > best) {
        best = sc;
        pred = i;
      }
    }
    if (pred != ex.y) {
      rows[ex.y - 1] += ex.x;
      rows[pred - 1] -= ex.x;
      ++mistakes;
    }
  }
  return {MlcWeights(k, d, std::move(rows)), mistakes};
}

PairwiseResult pairwise_init_train(SampleSource source, int i, int j,
                                   const TrainConfig& cfg) {
  if (i == j) throw PreconditionViolated("pairwise_init_train: i != j");
  LearnerSizes sizes = compute_sizes(LearnerKind::init, cfg, source.d());
  if (cfg.n_override) apply_budget(sizes, *cfg.n_override, 1);

  Rng local = Rng(cfg.seed).derive(pair_tag(i, j, 0));
  Rng init_rng = local.derive(0);
  Rng coin = local.derive(1);

  std::vector<IterateRecord> records;
  records.reserve(static_cast<size_t>(sizes.restarts) * (sizes.t + 1));
  for (int r = 0; r < sizes.restarts; ++r) {
    BlockSchedule sched;
    sched.block = r;
    const UnitVector w0 = UnitVector(init_rng.unit_vector(source.d()));
    run_block(source, i, j, sizes, sched, w0, coin, records);
  }
  const SelectionSample sel = draw_selection_sample(source, sizes.n_sel, source.d());
  const int best = selection_pass(records, 0, static_cast<int>(records.size()), sel, i, j);
  return finish(std::move(records), best, sizes, sizes.n_sel);
}

PairwiseResult pairwise_local3_train(SampleSource source, int i, int j,
                                     const TrainConfig& cfg) {
  if (i == j) throw PreconditionViolated("pairwise_local3_train: i != j");
  if (source.k() != 3)
    throw PreconditionViolated("pairwise_local3_train: source must have k = 3");
  LearnerSizes sizes = compute_sizes(LearnerKind::local3, cfg, source.d());
  const std::vector<double> grid = sigma_grid(sizes.grid_step);
  if (cfg.n_override) apply_budget(sizes, *cfg.n_override, static_cast<int>(grid.size()));

  Rng local = Rng(cfg.seed).derive(pair_tag(i, j, 1));
  Rng init_rng = local.derive(0);
  Rng coin = local.derive(1);

  std::vector<IterateRecord> records;
  int global_best = -1;
  for (size_t g = 0; g < grid.size(); ++g) {
    BlockSchedule sched;
    sched.block = static_cast<int>(g);
    sched.sigma_fixed = grid[g];
    const UnitVector w0 = UnitVector(init_rng.unit_vector(source.d()));
    auto [begin, end] = run_block(source, i, j, sizes, sched, w0, coin, records);
    const SelectionSample sel = draw_selection_sample(source, sizes.n_sel, source.d());
    const int best = selection_pass(records, begin, end, sel, i, j);
    if (global_best < 0 ||
        (best >= 0 && records[best].val_err < records[global_best].val_err))
      global_best = best;
  }
  return finish(std::move(records), global_best, sizes, sizes.n_sel);
}

PairwiseResult pairwise_localk_train(SampleSource source, int i, int j,
                                     const TrainConfig& cfg,
                                     std::optional<GeometryGuess> oracle) {
  if (i == j) throw PreconditionViolated("pairwise_localk_train: i != j");
  LearnerSizes sizes = compute_sizes(LearnerKind::localk, cfg, source.d());
  std::vector<GeometryGuess> guesses;
  if (oracle) {
    if (!(oracle->t_hat > 0.0 && oracle->t_hat <= 1.0 && oracle->phi_hat > 0.0 &&
          oracle->phi_hat <= 1.0))
      throw InvalidGeometryGuess("geometry guesses must lie in (0, 1]");
    guesses.push_back(*oracle);
  } else {
    const std::vector<double> grid = sigma_grid(sizes.grid_step);
    for (double t_hat : grid)
      for (double phi_hat : grid) guesses.push_back({t_hat, phi_hat});
  }
  if (cfg.n_override)
    apply_budget(sizes, *cfg.n_override, static_cast<int>(guesses.size()));

  // Warm start at accuracy epsilon/10 on the same stream.
  TrainConfig warm_cfg = cfg;
  warm_cfg.epsilon = cfg.epsilon / 10.0;
  warm_cfg.seed = Rng(cfg.seed).derive(pair_tag(i, j, 3)).seed();
  PairwiseResult warm = pairwise_init_train(source.derived(pair_tag(i, j, 4)), i, j, warm_cfg);

  Rng local = Rng(cfg.seed).derive(pair_tag(i, j, 2));
  Rng coin = local.derive(1);
  const double log_term = 10.0 * std::sqrt(std::log(source.k() + 1.0));

  std::vector<IterateRecord> records;
  // Warm-start iterates carried for gradient-norm bookkeeping only.
  for (const IterateRecord& rec : warm.trace.records) {
    IterateRecord copy = rec;
    copy.block = -1;
    copy.val_err = -1.0;
    records.push_back(std::move(copy));
  }

  int global_best = -1;
  for (size_t g = 0; g < guesses.size(); ++g) {
    BlockSchedule sched;
    sched.block = static_cast<int>(g);
    sched.t_hat = guesses[g].t_hat;
    sched.phi0 = guesses[g].t_hat * guesses[g].t_hat * guesses[g].phi_hat / log_term;
    sched.sigma_floor = sizes.sigma_floor;
    LearnerSizes block_sizes = sizes;
    if (cfg.preset == Preset::theory && !cfg.t_override)
      block_sizes.t += static_cast<long>(
          std::ceil(2.0 * sched.phi0 / std::pow(cfg.epsilon, 3)));
    // eta = eps^3 raised so the phi schedule reaches 0 within the block.
    sched.eta_step = std::max(std::pow(cfg.epsilon, 3),
                              sched.phi0 / (0.75 * static_cast<double>(block_sizes.t)));
    auto [begin, end] =
        run_block(source, i, j, block_sizes, sched, warm.w, coin, records);
    const SelectionSample sel = draw_selection_sample(source, sizes.n_sel, source.d());
    const int best = selection_pass(records, begin, end, sel, i, j);
    if (global_best < 0 ||
        (best >= 0 && records[best].val_err < records[global_best].val_err))
      global_best = best;
  }
  PairwiseResult out = finish(std::move(records), global_best, sizes, sizes.n_sel);
  out.trace.sizes.phi0 = guesses.size() == 1
                             ? guesses[0].t_hat * guesses[0].t_hat * guesses[0].phi_hat / log_term
                             : 0.0;
  return out;
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int idx = 0; idx < count; ++idx) fn(idx);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr eptr = nullptr;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      while (true) {
        const int idx = next.fetch_add(1);
        if (idx >= count) break;
        try {
          fn(idx);
        } catch (...) {
          std::lock_guard<std::mutex> lk(mu);
          if (!eptr) eptr = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (eptr) std::rethrow_exception(eptr);
}

AggregateResult aggregate_train(const SampleSource& source, const TrainConfig& cfg,
                                LearnerKind kind, const GeometryOracle& oracle) {
  cfg.validate();
  const int k = source.k();
  if (kind == LearnerKind::local3 && k != 3)
    throw PreconditionViolated("aggregate_train: local3 requires k = 3");

  struct PairJob {
    int i, j;
  };
  std::vector<PairJob> jobs;
  for (int i = 1; i <= k; ++i)
    for (int j = i + 1; j <= k; ++j) jobs.push_back({i, j});

  TrainConfig pair_cfg = cfg;
  pair_cfg.epsilon = cfg.epsilon / (k * k);
  pair_cfg.delta = cfg.delta / (k * k);

  std::vector<std::optional<PairTrainReport>> slots(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), cfg.threads, [&](int idx) {
    const auto [i, j] = jobs[idx];
    SampleSource pair_source = source.derived(pair_tag(i, j, 7));
    TrainConfig c = pair_cfg;
    c.seed = Rng(cfg.seed).derive(pair_tag(i, j, 8)).seed();
    PairwiseResult res = [&] {
      switch (kind) {
        case LearnerKind::init: return pairwise_init_train(std::move(pair_source), i, j, c);
        case LearnerKind::local3:
          return pairwise_local3_train(std::move(pair_source), i, j, c);
        case LearnerKind::localk: {
          std::optional<GeometryGuess> guess;
          if (oracle) guess = oracle(i, j);
          return pairwise_localk_train(std::move(pair_source), i, j, c, guess);
        }
      }
      throw ConfigError("aggregate_train: unknown learner kind");
    }();
    slots[idx] = PairTrainReport{i, j, std::move(res)};
  });

  std::vector<PairTrainReport> reports;
  std::vector<UnitVector> pairs;
  reports.reserve(jobs.size());
  pairs.reserve(jobs.size());
  for (auto& slot : slots) {
    pairs.push_back(slot->result.w);
    reports.push_back(std::move(*slot));
  }
  AggregateResult out{PseudoMlcWeights(k, source.d(), std::move(pairs)),
                      std::move(reports)};
  return out;
}

SelectionOutcome hypothesis_select(const std::vector<UnitVector>& candidates,
                                   SampleSource& source, int i, int j, long n_sel) {
  if (candidates.empty()) throw EmptyCandidates("hypothesis_select: no candidates");
  if (n_sel < 1) throw PreconditionViolated("hypothesis_select: n_sel >= 1");
  const SelectionSample sample = draw_selection_sample(source, n_sel, source.d());
  SelectionOutcome out;
  out.all_errs.reserve(candidates.size());
  std::size_t best = 0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const double e = sample_err_ij(sample, candidates[c].vec(), i, j);
    out.all_errs.push_back(e);
    if (e < out.all_errs[best]) best = c;
  }
  out.index = best;
  out.err = make_error_report(std::lround(out.all_errs[best] * n_sel), n_sel);
  return out;
}

}  // namespace gaussmlc
