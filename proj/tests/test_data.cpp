#include <cmath>
#include <cstdio>

#include "doctest.h"
#include "gaussmlc/data.hpp"
#include "gaussmlc/metrics.hpp"
#include "gaussmlc/report_io.hpp"

using namespace gaussmlc;

namespace {

SourceConfig planted_config(int k, int d, NoiseSpec noise, std::uint64_t seed) {
  Rng rng(seed ^ 0xABCDEF);
  SourceConfig cfg;
  cfg.d = d;
  cfg.k = k;
  cfg.truth = MlcWeights::random_unit_rows(k, d, rng);
  cfg.noise = std::move(noise);
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("data");

TEST_CASE("clean draw matches ground truth and gaussian marginal") {
  SampleSource source(planted_config(3, 6, NoiseSpec::none_spec(), 5));
  const auto sample = source.draw(20000);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(6);
  for (const auto& ex : sample) {
    CHECK(ex.y == source.predict_clean(ex.x));
    mean += ex.x;
  }
  mean /= static_cast<double>(sample.size());
  CHECK(mean.cwiseAbs().maxCoeff() < 3.0 / std::sqrt(20000.0));
}

TEST_CASE("draw determinism and derived independence") {
  const SourceConfig cfg = planted_config(3, 4, NoiseSpec::uniform_flip(0.2), 9);
  SampleSource a(cfg), b(cfg);
  const auto sa = a.draw(500);
  const auto sb = b.draw(500);
  for (int s = 0; s < 500; ++s) {
    CHECK(sa[s].y == sb[s].y);
    CHECK((sa[s].x - sb[s].x).norm() == 0.0);
  }
  SampleSource c = a.derived(7);
  const auto sc = c.draw(500);
  long same = 0;
  for (int s = 0; s < 500; ++s)
    if ((sa[s].x - sc[s].x).norm() == 0.0) ++same;
  CHECK(same == 0);
}

TEST_CASE("uniform_flip rate") {
  const double eta = 0.1;
  SampleSource source(planted_config(4, 5, NoiseSpec::uniform_flip(eta), 13));
  const long n = 100000;
  long flipped = 0;
  LabeledExample ex;
  for (long s = 0; s < n; ++s) {
    source.draw_into(ex);
    if (ex.y != source.predict_clean(ex.x)) ++flipped;
  }
  const double rate = static_cast<double>(flipped) / n;
  CHECK(std::abs(rate - eta) < 0.003);
}

TEST_CASE("pair_confusion") {
  const double eta = 0.2;
  SampleSource source(planted_config(3, 5, NoiseSpec::pair_confusion(1, 2, eta), 17));
  const long n = 200000;
  long clean1 = 0, observed2 = 0, off_pair_flips = 0;
  LabeledExample ex;
  for (long s = 0; s < n; ++s) {
    source.draw_into(ex);
    const int truth = source.predict_clean(ex.x);
    if (truth == 1) {
      ++clean1;
      if (ex.y == 2) ++observed2;
    }
    if (truth == 3 && ex.y != 3) ++off_pair_flips;
  }
  const double swap_rate = static_cast<double>(observed2) / clean1;
  CHECK(std::abs(swap_rate - eta) < 0.005);
  CHECK(off_pair_flips == 0);
}

TEST_CASE("eta = 0 is the identity channel") {
  SampleSource source(planted_config(3, 4, NoiseSpec::uniform_flip(0.0), 23));
  LabeledExample ex;
  for (int s = 0; s < 2000; ++s) {
    source.draw_into(ex);
    CHECK(ex.y == source.predict_clean(ex.x));
  }
}

TEST_CASE("boundary_flip calibration and concentration") {
  const double eta = 0.04;
  const double tau = 0.05;
  SampleSource source(planted_config(3, 8, NoiseSpec::boundary_flip(eta, tau), 29));
  REQUIRE(source.band_mass() > 1e-6);

  const long n = 200000;
  long flips = 0, band = 0, band_flips = 0;
  LabeledExample ex;
  const auto& W = std::get<MlcWeights>(source.config().truth);
  for (long s = 0; s < n; ++s) {
    source.draw_into(ex);
    const int truth = source.predict_clean(ex.x);
    const bool in_band = multiclass_margin(W, ex.x, truth) < tau;
    if (in_band) ++band;
    if (ex.y != truth) {
      ++flips;
      if (in_band) ++band_flips;
    }
  }
  const double total_rate = static_cast<double>(flips) / n;
  CHECK(total_rate <= eta + 1e-3 + 3.0 * std::sqrt(eta / n));
  // flips happen only inside the band
  CHECK(band_flips == flips);
  // conditional flip rate in the band dominates the unconditional rate
  const double band_mass = static_cast<double>(band) / n;
  if (band_mass <= 0.25) {
    const double cond = static_cast<double>(band_flips) / band;
    CHECK(cond >= 2.0 * total_rate);
  }
}

TEST_CASE("noise spec validation") {
  CHECK_THROWS_AS(NoiseSpec::uniform_flip(0.7).validate(3), ConfigError);
  CHECK_THROWS_AS(NoiseSpec::pair_confusion(1, 1, 0.1).validate(3), ConfigError);
  CHECK_THROWS_AS(NoiseSpec::pair_confusion(1, 5, 0.1).validate(3), ConfigError);
  CHECK_THROWS_AS(NoiseSpec::boundary_flip(0.1, -1.0).validate(3), ConfigError);
  NoiseSpec missing_pair;
  missing_pair.kind = NoiseKind::pair_confusion;
  missing_pair.rate = 0.1;
  CHECK_THROWS_AS(missing_pair.validate(3), ConfigError);

  // hard instance has no margin; boundary_flip must be rejected
  SourceConfig cfg;
  cfg.d = 4;
  cfg.k = 3;
  cfg.truth = HardInstanceSpec(3, 4);
  cfg.noise = NoiseSpec::boundary_flip(0.1, 0.1);
  cfg.seed = 3;
  CHECK_THROWS_AS(SampleSource{cfg}, ConfigError);
}

TEST_CASE("planted opt upper bound certified for every channel") {
  const double eta = 0.12;
  for (const NoiseSpec& noise :
       {NoiseSpec::uniform_flip(eta), NoiseSpec::pair_confusion(2, 3, eta),
        NoiseSpec::boundary_flip(eta, 0.08)}) {
    SampleSource source(planted_config(3, 6, noise, 31));
    const long n = 100000;
    long flips = 0;
    LabeledExample ex;
    for (long s = 0; s < n; ++s) {
      source.draw_into(ex);
      if (ex.y != source.predict_clean(ex.x)) ++flips;
    }
    const double rate = static_cast<double>(flips) / n;
    const double se = std::sqrt(eta * (1 - eta) / n);
    CHECK(rate <= eta + 1e-3 + 3.0 * se);
  }
}

TEST_CASE("dataset round trip") {
  SampleSource source(planted_config(3, 4, NoiseSpec::uniform_flip(0.1), 37));
  const auto examples = source.draw(1000);
  const std::string path = "test_dataset_roundtrip.txt";
  save_dataset(examples, 4, 3, path);
  const Dataset loaded = load_dataset(path);
  CHECK(loaded.d == 4);
  CHECK(loaded.k == 3);
  REQUIRE(loaded.examples.size() == examples.size());
  for (size_t s = 0; s < examples.size(); ++s) {
    CHECK(loaded.examples[s].y == examples[s].y);
    CHECK((loaded.examples[s].x - examples[s].x).norm() == 0.0);  // bit exact
  }

  save_dataset({}, 4, 3, path);
  CHECK(load_dataset(path).examples.empty());

  write_text_file(path, "gauss-mlc-dataset v1 d=4 k=3\n2 0.5 0.25\n");
  CHECK_THROWS_AS(load_dataset(path), FormatError);
  write_text_file(path, "wrong header\n");
  CHECK_THROWS_AS(load_dataset(path), FormatError);
  CHECK_THROWS_AS(load_dataset("does_not_exist_anywhere.txt"), IoError);
  std::remove(path.c_str());
}

TEST_SUITE_END();
