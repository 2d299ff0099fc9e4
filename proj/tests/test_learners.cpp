#include <cmath>

#include "doctest.h"
#include "gaussmlc/learners.hpp"
#include "gaussmlc/lemma_lab.hpp"

using namespace gaussmlc;

namespace {

SourceConfig planted(int k, int d, NoiseSpec noise, std::uint64_t seed) {
  Rng rng(seed * 977 + 5);
  SourceConfig cfg;
  cfg.d = d;
  cfg.k = k;
  cfg.truth = MlcWeights::random_unit_rows(k, d, rng);
  cfg.noise = std::move(noise);
  cfg.seed = seed;
  return cfg;
}

TrainConfig quick_config(std::uint64_t seed, double eps = 0.05) {
  TrainConfig tc;
  tc.epsilon = eps;
  tc.delta = 0.1;
  tc.seed = seed;
  tc.t_override = 400;
  tc.selection_n_override = 4000;
  return tc;
}

}  // namespace

TEST_SUITE_BEGIN("learners");

TEST_CASE("theory preset size formulas") {
  TrainConfig tc;
  tc.epsilon = 0.5;
  tc.delta = 0.1;
  tc.big_c = 10.0;
  tc.preset = Preset::theory;
  const int d = 5;
  const LearnerSizes init = compute_sizes(LearnerKind::init, tc, d);
  CHECK(init.n == static_cast<long>(std::ceil(4.0 * d * std::log(20.0) / std::pow(0.5, 6))));
  CHECK(init.t == static_cast<long>(std::ceil(4.0 * 10.0 / std::pow(0.5, 6))));
  CHECK(init.mu == doctest::Approx(0.25 / 10.0));
  CHECK(init.restarts == static_cast<int>(std::ceil(std::log2(30.0))));

  const LearnerSizes l3 = compute_sizes(LearnerKind::local3, tc, d);
  CHECK(l3.n == static_cast<long>(std::ceil(16.0 * d * std::log(20.0) / std::pow(0.5, 4))));
  CHECK(l3.t == static_cast<long>(std::ceil(4.0 * 10.0 / 0.25)));
  CHECK(l3.mu == doctest::Approx(0.5 / 10.0));

  const LearnerSizes lk = compute_sizes(LearnerKind::localk, tc, d);
  CHECK(lk.mu == doctest::Approx(std::pow(0.5, 3) / 10.0));
}

TEST_CASE("sigma grid formula") {
  const auto grid = sigma_grid(0.25);
  REQUIRE(grid.size() == 4);
  CHECK(grid[0] == doctest::Approx(0.25));
  CHECK(grid[3] == doctest::Approx(1.0));

  const auto fine = sigma_grid(0.3);
  REQUIRE(fine.size() == 3);  // {0.3, 0.6, 0.9}
  CHECK(fine[2] == doctest::Approx(0.9));
}

TEST_CASE("perceptron update rule") {
  // one forced mistake: w_y += x, w_pred -= x, others unchanged
  SourceConfig cfg = planted(3, 3, NoiseSpec::none_spec(), 2);
  SampleSource src(cfg);
  Rng init_rng(77);
  Rng replay(77);
  std::vector<Eigen::VectorXd> start;
  for (int i = 0; i < 3; ++i) start.push_back(replay.gaussian_vector(3));
  const PerceptronResult res = perceptron_train(src, 1, init_rng);

  SampleSource src2(cfg);
  LabeledExample ex;
  src2.draw_into(ex);
  const MlcWeights W0(3, 3, start);
  const int pred = mlc_predict(W0, ex.x);
  if (pred == ex.y) {
    for (int i = 0; i < 3; ++i) CHECK((res.weights.rows[i] - start[i]).norm() == 0.0);
    CHECK(res.mistakes == 0);
  } else {
    CHECK((res.weights.rows[ex.y - 1] - (start[ex.y - 1] + ex.x)).norm() == 0.0);
    CHECK((res.weights.rows[pred - 1] - (start[pred - 1] - ex.x)).norm() == 0.0);
    CHECK(res.mistakes == 1);
  }
}

TEST_CASE("perceptron learns a margin-filtered binary task") {
  // k=2 planted with multiclass margin >= 0.2 enforced by rejection
  Rng wr(5);
  const MlcWeights W = [&] {
    std::vector<Eigen::VectorXd> rows;
    rows.push_back(wr.unit_vector(10) / std::sqrt(2.0));
    rows.push_back(wr.unit_vector(10) / std::sqrt(2.0));
    return MlcWeights(2, 10, rows);
  }();
  Rng data_rng(6);
  std::vector<Eigen::VectorXd> start;
  for (int i = 0; i < 2; ++i) start.push_back(data_rng.gaussian_vector(10));
  std::vector<Eigen::VectorXd> rows = start;
  long mistakes = 0;
  for (int s = 0; s < 10000; ++s) {
    Eigen::VectorXd x;
    int y;
    while (true) {
      x = data_rng.gaussian_vector(10);
      y = mlc_predict(W, x);
      if (multiclass_margin(W, x, y) >= 0.2) break;
    }
    const MlcWeights cur(2, 10, rows);
    const int pred = mlc_predict(cur, x);
    if (pred != y) {
      rows[y - 1] += x;
      rows[pred - 1] -= x;
      ++mistakes;
    }
  }
  const MlcWeights learned(2, 10, rows);
  Rng eval(7);
  long wrong = 0;
  const long n_eval = 20000;
  for (long s = 0; s < n_eval; ++s) {
    Eigen::VectorXd x;
    int y;
    while (true) {
      x = eval.gaussian_vector(10);
      y = mlc_predict(W, x);
      if (multiclass_margin(W, x, y) >= 0.2) break;
    }
    if (mlc_predict(learned, x) != y) ++wrong;
  }
  CHECK(static_cast<double>(wrong) / n_eval <= 0.05);
}

TEST_CASE("pairwise_init_train on clean k=2") {
  SourceConfig cfg = planted(2, 20, NoiseSpec::none_spec(), 11);
  SampleSource src(cfg);
  const auto& W = std::get<MlcWeights>(cfg.truth);
  TrainConfig tc = quick_config(3);
  const PairwiseResult res = pairwise_init_train(src.derived(1), 1, 2, tc);
  Rng mc(13);
  const ErrorReport rep = err_ij_vs_model(res.w, W, 1, 2, 100000, mc);
  CHECK(rep.value <= 0.05);

  // invariants on the trace
  const auto& recs = res.trace.records;
  for (const auto& rec : recs) {
    CHECK(std::abs(rec.w.norm() - 1.0) <= 1e-9);
    if (rec.g_hat.size() > 0) CHECK(std::abs(rec.g_hat.dot(rec.w)) <= 1e-9);
    // Fact-style norm bound with sampling slack
    CHECK(rec.grad_norm <=
          1.0 / std::sqrt(2.0 * M_PI) +
              5.0 * std::sqrt(static_cast<double>(src.d()) / res.trace.sizes.n));
  }
  // monotone selection
  const double chosen = recs[res.trace.selected].val_err;
  for (const auto& rec : recs)
    if (rec.val_err >= 0.0) CHECK(chosen <= rec.val_err);
}

TEST_CASE("pairwise_init_train under uniform flips stays within the sqrt(eta) budget") {
  const double eta = 0.04;
  SourceConfig cfg = planted(3, 20, NoiseSpec::uniform_flip(eta), 13);
  SampleSource src(cfg);
  const auto& W = std::get<MlcWeights>(cfg.truth);
  TrainConfig tc = quick_config(5);
  tc.t_override = 700;
  const PairwiseResult res = pairwise_init_train(src.derived(2), 1, 2, tc);
  Rng mc(6);
  const double e = err_ij_vs_model(res.w, W, 1, 2, 100000, mc).value;
  // c1 = excess over eps in units of sqrt(eta); recorded, expected well below 10
  const double c1 = std::max(0.0, (e - 0.05) / std::sqrt(eta));
  MESSAGE("noisy init c1 = ", c1, " (err_ij vs clean model = ", e, ")");
  CHECK(c1 <= 10.0);
}

TEST_CASE("aggregate trains each pair at eps/k^2 and delta/k^2") {
  SourceConfig cfg = planted(2, 6, NoiseSpec::none_spec(), 19);
  TrainConfig tc;
  tc.epsilon = 0.9;  // pair accuracy 0.225, above the desk floor, so visible in N
  tc.delta = 0.4;
  tc.seed = 3;
  tc.t_override = 20;
  tc.selection_n_override = 500;
  const AggregateResult agg = aggregate_train(SampleSource(cfg), tc, LearnerKind::init);
  TrainConfig pair_cfg = tc;
  pair_cfg.epsilon = 0.9 / 4.0;
  pair_cfg.delta = 0.4 / 4.0;
  const LearnerSizes expected = compute_sizes(LearnerKind::init, pair_cfg, 6);
  CHECK(agg.pair_reports[0].result.trace.sizes.n == expected.n);
  CHECK(agg.pair_reports[0].result.trace.sizes.mu == doctest::Approx(expected.mu));
}

TEST_CASE("pairwise_init_train determinism") {
  SourceConfig cfg = planted(3, 8, NoiseSpec::uniform_flip(0.05), 21);
  TrainConfig tc = quick_config(9);
  tc.t_override = 60;
  const PairwiseResult a = pairwise_init_train(SampleSource(cfg), 1, 3, tc);
  const PairwiseResult b = pairwise_init_train(SampleSource(cfg), 1, 3, tc);
  REQUIRE(a.trace.records.size() == b.trace.records.size());
  CHECK(a.trace.selected == b.trace.selected);
  for (size_t r = 0; r < a.trace.records.size(); ++r) {
    CHECK((a.trace.records[r].w - b.trace.records[r].w).norm() == 0.0);
    CHECK(a.trace.records[r].val_err == b.trace.records[r].val_err);
  }
}

TEST_CASE("pgd progress inequality holds on recorded clean k=2 iterates") {
  SourceConfig cfg = planted(2, 10, NoiseSpec::none_spec(), 31);
  SampleSource src(cfg);
  const auto& W = std::get<MlcWeights>(cfg.truth);
  const UnitVector w_star = pairwise_boundary_direction(W, 1, 2);
  TrainConfig tc = quick_config(17);
  tc.t_override = 120;
  const PairwiseResult res = pairwise_init_train(src.derived(4), 1, 2, tc);
  const double mu = res.trace.sizes.mu;
  const double inv_root = 1.0 / std::sqrt(2.0 * M_PI);
  int checked = 0;
  for (const auto& rec : res.trace.records) {
    if (rec.g_hat.size() == 0) continue;
    const UnitVector w_t(rec.w);
    // closed-form population gradient: proj of (w* - w)/sqrt(2 pi)
    const Eigen::VectorXd g =
        project_orthogonal(inv_root * (w_star.vec() - rec.w), w_t);
    const CheckResult chk = pgd_inequality_check(w_star, w_t, rec.g_hat, g, mu);
    CHECK(chk.pass);
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("pairwise_local3_train") {
  SourceConfig cfg = planted(3, 10, NoiseSpec::none_spec(), 41);
  SampleSource src(cfg);
  const auto& W = std::get<MlcWeights>(cfg.truth);

  SUBCASE("requires k = 3") {
    SourceConfig c2 = planted(4, 10, NoiseSpec::none_spec(), 42);
    CHECK_THROWS_AS(pairwise_local3_train(SampleSource(c2), 1, 2, quick_config(1)),
                    PreconditionViolated);
  }

  SUBCASE("clean convergence and sigma bookkeeping") {
    TrainConfig tc = quick_config(43);
    tc.t_override = 250;
    const PairwiseResult res = pairwise_local3_train(src.derived(2), 1, 2, tc);
    Rng mc(44);
    CHECK(err_ij_vs_model(res.w, W, 1, 2, 100000, mc).value <= 0.05);
    // the trace must sweep the sigma grid {0.2, 0.4, 0.6, 0.8, 1.0}
    std::vector<double> seen;
    for (const auto& rec : res.trace.records)
      if (seen.empty() || rec.sigma_t != seen.back()) seen.push_back(rec.sigma_t);
    CHECK(seen.size() == 5);
    CHECK(seen.front() == doctest::Approx(0.2));
    CHECK(seen.back() == doctest::Approx(1.0));
  }
}

TEST_CASE("pairwise_localk_train") {
  SourceConfig cfg = planted(4, 12, NoiseSpec::none_spec(), 51);
  SampleSource src(cfg);
  const auto& W = std::get<MlcWeights>(cfg.truth);

  SUBCASE("oracle guesses validated") {
    CHECK_THROWS_AS(pairwise_localk_train(src.derived(1), 1, 2, quick_config(1),
                                          GeometryGuess{1.5, 0.5}),
                    InvalidGeometryGuess);
    CHECK_THROWS_AS(pairwise_localk_train(src.derived(1), 1, 2, quick_config(1),
                                          GeometryGuess{0.5, 0.0}),
                    InvalidGeometryGuess);
  }

  SUBCASE("oracle mode converges on clean data") {
    TrainConfig tc = quick_config(53, 0.1);
    tc.t_override = 250;
    const PairwiseResult res =
        pairwise_localk_train(src.derived(3), 1, 2, tc, GeometryGuess{0.25, 1.0});
    Rng mc(54);
    CHECK(err_ij_vs_model(res.w, W, 1, 2, 100000, mc).value <= 0.1);
    // phi schedule decreases to zero and sigma stays in [floor, 1]
    double prev_phi = 1e9;
    for (const auto& rec : res.trace.records) {
      if (rec.block < 0) continue;  // warm-start bookkeeping
      CHECK(rec.phi_t <= prev_phi + 1e-15);
      prev_phi = rec.phi_t;
      CHECK(rec.sigma_t >= 0.05 - 1e-12);
      CHECK(rec.sigma_t <= 1.0);
    }
  }

  SUBCASE("grid mode at eps = 0.5 uses 4 geometry guesses") {
    TrainConfig tc = quick_config(55, 0.5);
    tc.t_override = 40;
    const PairwiseResult res = pairwise_localk_train(src.derived(5), 1, 2, tc, {});
    int max_block = 0;
    for (const auto& rec : res.trace.records) max_block = std::max(max_block, rec.block);
    CHECK(max_block == 3);  // blocks 0..3 for {0.5, 1.0}^2
  }
}

TEST_CASE("sigma_t formula spot value") {
  // phi = pi/6, T_hat = 0.25 -> min{3 sin(phi)/sqrt(T_hat), 1} = min{3, 1} = 1
  const double sigma = std::min(3.0 * std::sin(M_PI / 6.0) / std::sqrt(0.25), 1.0);
  CHECK(sigma == doctest::Approx(1.0));
}

TEST_CASE("aggregate_train") {
  SUBCASE("k=2 reduces to the single pairwise halfspace") {
    SourceConfig cfg = planted(2, 8, NoiseSpec::none_spec(), 61);
    TrainConfig tc = quick_config(62);
    tc.t_override = 150;
    const AggregateResult agg = aggregate_train(SampleSource(cfg), tc, LearnerKind::init);
    REQUIRE(agg.pair_reports.size() == 1);
    CHECK((agg.weights.pair(1, 2).vec() - agg.pair_reports[0].result.w.vec()).norm() == 0.0);
    Rng mc(63);
    const auto& W = std::get<MlcWeights>(cfg.truth);
    for (int t = 0; t < 100; ++t) {
      const Eigen::VectorXd x = mc.gaussian_vector(8);
      const int by_sign = agg.weights.pair(1, 2).dot(x) >= 0.0 ? 1 : 2;
      CHECK(pseudo_predict(agg.weights, x) == by_sign);
    }
  }

  SUBCASE("scheduling independence: threads do not change the result") {
    SourceConfig cfg = planted(3, 6, NoiseSpec::uniform_flip(0.05), 71);
    TrainConfig tc = quick_config(72);
    tc.t_override = 50;
    tc.threads = 1;
    const AggregateResult a = aggregate_train(SampleSource(cfg), tc, LearnerKind::init);
    tc.threads = 2;
    const AggregateResult b = aggregate_train(SampleSource(cfg), tc, LearnerKind::init);
    for (int i = 1; i <= 3; ++i)
      for (int j = i + 1; j <= 3; ++j)
        CHECK((a.weights.pair(i, j).vec() - b.weights.pair(i, j).vec()).norm() == 0.0);
  }

  SUBCASE("local3 on k != 3 rejected") {
    SourceConfig cfg = planted(4, 6, NoiseSpec::none_spec(), 81);
    CHECK_THROWS_AS(aggregate_train(SampleSource(cfg), quick_config(1), LearnerKind::local3),
                    PreconditionViolated);
  }
}

TEST_CASE("hypothesis_select") {
  SourceConfig cfg = planted(2, 6, NoiseSpec::none_spec(), 91);
  SampleSource src(cfg);
  const auto& W = std::get<MlcWeights>(cfg.truth);
  const UnitVector w_star = pairwise_boundary_direction(W, 1, 2);

  SUBCASE("picks w* over -w*") {
    SampleSource sel = src.derived(1);
    const SelectionOutcome out = hypothesis_select({w_star, -w_star}, sel, 1, 2, 2000);
    CHECK(out.index == 0);
    CHECK(out.err.value == 0.0);
  }

  SUBCASE("single candidate") {
    SampleSource sel = src.derived(2);
    CHECK(hypothesis_select({w_star}, sel, 1, 2, 100).index == 0);
  }

  SUBCASE("separates a 0.2 error gap at n_sel = 2000") {
    Rng rng(93);
    Eigen::VectorXd perp = normalize(project_orthogonal(rng.gaussian_vector(6), w_star)).vec();
    // competitor at angle 0.2*pi: err_ij = 0.2
    const UnitVector bad =
        normalize(std::cos(0.2 * M_PI) * w_star.vec() + std::sin(0.2 * M_PI) * perp);
    int correct = 0;
    for (int trial = 0; trial < 50; ++trial) {
      SampleSource sel = src.derived(100 + trial);
      if (hypothesis_select({bad, w_star}, sel, 1, 2, 2000).index == 1) ++correct;
    }
    CHECK(correct >= 49);
  }

  SUBCASE("errors") {
    SampleSource sel = src.derived(3);
    CHECK_THROWS_AS(hypothesis_select({}, sel, 1, 2, 100), EmptyCandidates);
  }
}

TEST_CASE("rejection_sample starvation guard") {
  SourceConfig cfg = planted(3, 6, NoiseSpec::none_spec(), 95);
  SampleSource src(cfg);
  Rng coin(1);
  const UnitVector w(Rng(2).unit_vector(6));
  const LocalizationSpec spec(w, 0.1);
  // factor 1 allows only ~10 raw draws per accepted sample at sigma=0.1
  CHECK_THROWS_AS(rejection_sample(src, 2000, spec, coin, 0.5), AcceptanceStarvation);

  // generous cap: acceptance rate matches sigma
  SampleSource src2 = src.derived(9);
  Rng coin2(3);
  const auto accepted = rejection_sample(src2, 5000, spec, coin2, 100);
  CHECK(accepted.size() == 5000);
}

TEST_CASE("budget override splits the stream") {
  SourceConfig cfg = planted(3, 6, NoiseSpec::none_spec(), 97);
  TrainConfig tc = quick_config(98);
  tc.n_override = 20000;
  tc.t_override = 50;
  const PairwiseResult res = pairwise_init_train(SampleSource(cfg), 1, 2, tc);
  CHECK(res.trace.sizes.restarts == 1);
  CHECK(res.trace.sizes.n_sel == 5000);
  CHECK(res.trace.sizes.n == (20000 - 5000) / 50);
}

TEST_SUITE_END();
