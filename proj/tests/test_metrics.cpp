#include <cmath>

#include "doctest.h"
#include "gaussmlc/metrics.hpp"

using namespace gaussmlc;

namespace {

SourceConfig planted_config(int k, int d, NoiseSpec noise, std::uint64_t seed) {
  Rng rng(seed ^ 0x5EED);
  SourceConfig cfg;
  cfg.d = d;
  cfg.k = k;
  cfg.truth = MlcWeights::random_unit_rows(k, d, rng);
  cfg.noise = std::move(noise);
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("metrics");

TEST_CASE("err basics") {
  SampleSource clean(planted_config(3, 5, NoiseSpec::none_spec(), 3));
  const auto& W = std::get<MlcWeights>(clean.config().truth);
  const auto sample = clean.draw(20000);
  const ErrorReport zero = err([&](const Eigen::VectorXd& x) { return mlc_predict(W, x); },
                               sample);
  CHECK(zero.value == 0.0);

  // hard instance k=2, constant classifier "always 1": Pr[f=2] = 1/2
  SourceConfig hard_cfg;
  hard_cfg.d = 2;
  hard_cfg.k = 2;
  hard_cfg.truth = HardInstanceSpec(2, 2);
  hard_cfg.noise = NoiseSpec::none_spec();
  hard_cfg.seed = 4;
  SampleSource hard(hard_cfg);
  const auto hs = hard.draw(100000);
  const ErrorReport half = err([](const Eigen::VectorXd&) { return 1; }, hs);
  CHECK(std::abs(half.value - 0.5) <= 3.0 * half.std_err);

  // random guessing over k labels: (k-1)/k
  Rng guess_rng(11);
  const int k = 4;
  SampleSource src(planted_config(k, 5, NoiseSpec::none_spec(), 5));
  const auto gs = src.draw(100000);
  const ErrorReport guess =
      err([&](const Eigen::VectorXd&) {
        return 1 + static_cast<int>(guess_rng.uniform_int(0, k - 1));
      }, gs);
  const double expected = static_cast<double>(k - 1) / k;
  CHECK(std::abs(guess.value - expected) <= 3.0 * guess.std_err);

  CHECK_THROWS_AS(err([](const Eigen::VectorXd&) { return 1; }, {}), EmptySample);
}

TEST_CASE("err_ij on labeled samples") {
  SampleSource clean(planted_config(2, 6, NoiseSpec::none_spec(), 7));
  const auto& W = std::get<MlcWeights>(clean.config().truth);
  const auto sample = clean.draw(50000);
  const UnitVector w12 = pairwise_boundary_direction(W, 1, 2);
  CHECK(err_ij(w12, sample, 1, 2).value == 0.0);

  // reversed separator misclassifies every pair-labeled point
  const ErrorReport rev = err_ij(-w12, sample, 1, 2);
  CHECK(rev.value == doctest::Approx(1.0));

  // orthogonal separator: 0.5
  Rng rng(8);
  Eigen::VectorXd perp = project_orthogonal(rng.gaussian_vector(6), w12);
  const ErrorReport orth = err_ij(normalize(perp), sample, 1, 2);
  CHECK(std::abs(orth.value - 0.5) <= 3.0 * orth.std_err);

  // err_ij(w) + err_ij(-w) = Pr[y in {i,j}] up to ties
  SampleSource noisy(planted_config(3, 6, NoiseSpec::uniform_flip(0.1), 9));
  const auto ns = noisy.draw(30000);
  const UnitVector w(rng.unit_vector(6));
  long pair_mass = 0;
  for (const auto& ex : ns)
    if (ex.y == 1 || ex.y == 2) ++pair_mass;
  const double both = err_ij(w, ns, 1, 2).value + err_ij(-w, ns, 1, 2).value;
  CHECK(both == doctest::Approx(static_cast<double>(pair_mass) / ns.size()).epsilon(1e-12));
}

TEST_CASE("err_ij_vs_model matches theta/pi for k=2") {
  Rng rng(12);
  const MlcWeights W = MlcWeights::random_unit_rows(2, 10, rng);
  const UnitVector w12 = pairwise_boundary_direction(W, 1, 2);

  Rng mc(13);
  CHECK(err_ij_vs_model(w12, W, 1, 2, 20000, mc).value == 0.0);

  for (double theta : {0.1, 0.5, 1.0, 1.5}) {
    Eigen::VectorXd perp = normalize(project_orthogonal(rng.gaussian_vector(10), w12)).vec();
    const UnitVector w = normalize(std::cos(theta) * w12.vec() + std::sin(theta) * perp);
    const ErrorReport rep = err_ij_vs_model(w, W, 1, 2, 200000, mc);
    CHECK(std::abs(rep.value - theta / M_PI) <= 3.0 * rep.std_err);
  }

  CHECK_THROWS_AS(err_ij_vs_model(w12, W, 1, 1, 10, mc), PreconditionViolated);
}

TEST_CASE("confusion") {
  SampleSource clean(planted_config(3, 5, NoiseSpec::none_spec(), 21));
  const auto& W = std::get<MlcWeights>(clean.config().truth);
  const Classifier f = [&](const Eigen::VectorXd& x) { return mlc_predict(W, x); };
  const auto cs = clean.draw(20000);
  const ConfusionEstimate zero = confusion(f, cs);
  CHECK(zero.entries.cwiseAbs().maxCoeff() == 0.0);
  CHECK(zero.o_ij(1, 2) == 0.0);

  const double eta = 0.2;
  SampleSource noisy(planted_config(3, 5, NoiseSpec::pair_confusion(1, 2, eta), 22));
  const auto& Wn = std::get<MlcWeights>(noisy.config().truth);
  const Classifier fn = [&](const Eigen::VectorXd& x) { return mlc_predict(Wn, x); };
  const auto nsm = noisy.draw(200000);
  const ConfusionEstimate est = confusion(fn, nsm);
  long c1 = 0, c2 = 0;
  for (const auto& ex : nsm) {
    const int t = fn(ex.x);
    if (t == 1) ++c1;
    if (t == 2) ++c2;
  }
  const double p1 = static_cast<double>(c1) / nsm.size();
  const double p2 = static_cast<double>(c2) / nsm.size();
  CHECK(std::abs(est.entries(0, 1) - eta * p1) < 0.005);
  CHECK(std::abs(est.entries(1, 0) - eta * p2) < 0.005);
  CHECK(est.entries(2, 0) == 0.0);
  CHECK(est.entries(2, 1) == 0.0);

  // O_ij dominates its own terms
  CHECK(est.o_ij(1, 2) >= est.entries(0, 1) + est.entries(1, 0));
}

TEST_CASE("decomposition_check") {
  Rng rng(31);

  SUBCASE("zero pairwise errors") {
    SampleSource clean(planted_config(2, 5, NoiseSpec::none_spec(), 33));
    const auto& W = std::get<MlcWeights>(clean.config().truth);
    const PseudoMlcWeights P(2, 5, {pairwise_boundary_direction(W, 1, 2)});
    const auto sample = clean.draw(20000);
    const DecompositionResult res = decomposition_check(P, sample);
    CHECK(res.err_value == 0.0);
    CHECK(res.pairwise_bound == 0.0);
    CHECK(res.holds);
  }

  SUBCASE("k=2 collapse: bound equals err_12") {
    SampleSource noisy(planted_config(2, 5, NoiseSpec::uniform_flip(0.15), 34));
    const UnitVector w(rng.unit_vector(5));
    const PseudoMlcWeights P(2, 5, {w});
    const auto sample = noisy.draw(30000);
    const DecompositionResult res = decomposition_check(P, sample);
    const ErrorReport direct = err_ij(w, sample, 1, 2);
    CHECK(res.pairwise_bound == doctest::Approx(direct.value).epsilon(1e-12));
    CHECK(res.holds);
  }

  SUBCASE("random instances always hold") {
    for (int trial = 0; trial < 25; ++trial) {
      const int k = 2 + static_cast<int>(rng.uniform_int(0, 3));
      const int d = 3 + static_cast<int>(rng.uniform_int(0, 5));
      std::vector<UnitVector> pairs;
      for (int p = 0; p < k * (k - 1) / 2; ++p) pairs.push_back(UnitVector(rng.unit_vector(d)));
      const PseudoMlcWeights P(k, d, std::move(pairs));
      SampleSource src(planted_config(
          k, d, trial % 2 == 0 ? NoiseSpec::none_spec() : NoiseSpec::uniform_flip(0.2),
          100 + trial));
      const auto sample = src.draw(20000);
      CHECK(decomposition_check(P, sample).holds);
    }
  }
}

TEST_SUITE_END();
