#include "gaussmlc/data.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "gaussmlc/report_io.hpp"

namespace gaussmlc {

namespace {

constexpr std::uint64_t kCalibrationTag = 0xCA11B8A7E5711ull;
constexpr int kCalibrationSamples = 100000;
constexpr double kMinBandMass = 1e-6;

}  // namespace

std::string noise_kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::none: return "none";
    case NoiseKind::uniform_flip: return "uniform_flip";
    case NoiseKind::pair_confusion: return "pair_confusion";
    case NoiseKind::boundary_flip: return "boundary_flip";
  }
  throw ConfigError("unknown noise kind");
}

NoiseKind noise_kind_from_name(const std::string& name) {
  if (name == "none") return NoiseKind::none;
  if (name == "uniform_flip") return NoiseKind::uniform_flip;
  if (name == "pair_confusion") return NoiseKind::pair_confusion;
  if (name == "boundary_flip") return NoiseKind::boundary_flip;
  throw ConfigError("unknown noise kind: " + name);
}

NoiseSpec NoiseSpec::none_spec() { return NoiseSpec{}; }

NoiseSpec NoiseSpec::uniform_flip(double eta) {
  NoiseSpec s;
  s.kind = NoiseKind::uniform_flip;
  s.rate = eta;
  return s;
}

NoiseSpec NoiseSpec::pair_confusion(int i, int j, double eta) {
  NoiseSpec s;
  s.kind = NoiseKind::pair_confusion;
  s.rate = eta;
  s.pair = {i, j};
  return s;
}

NoiseSpec NoiseSpec::boundary_flip(double eta, double tau) {
  NoiseSpec s;
  s.kind = NoiseKind::boundary_flip;
  s.rate = eta;
  s.band = tau;
  return s;
}

void NoiseSpec::validate(int k) const {
  if (!(rate >= 0.0 && rate <= 0.5)) throw ConfigError("noise rate must lie in [0, 1/2]");
  if ((kind == NoiseKind::pair_confusion) != pair.has_value())
    throw ConfigError("pair present iff kind = pair_confusion");
  if ((kind == NoiseKind::boundary_flip) != band.has_value())
    throw ConfigError("band present iff kind = boundary_flip");
  if (pair) {
    const auto [i, j] = *pair;
    if (i < 1 || j < 1 || i > k || j > k || i == j)
      throw ConfigError("pair_confusion: invalid pair");
  }
  if (band && !(*band > 0.0)) throw ConfigError("boundary_flip: band must be positive");
}

int ground_truth_predict(const GroundTruth& truth, const Eigen::VectorXd& x) {
  if (std::holds_alternative<MlcWeights>(truth))
    return mlc_predict(std::get<MlcWeights>(truth), x);
  return hard_instance_predict(std::get<HardInstanceSpec>(truth), x);
}

SampleSource::SampleSource(SourceConfig cfg)
    : cfg_(std::move(cfg)),
      rng_(Rng(cfg_.seed)),
      band_mass_(std::numeric_limits<double>::quiet_NaN()) {
  if (cfg_.d < 1 || cfg_.k < 2) throw ConfigError("SampleSource: need d >= 1, k >= 2");
  cfg_.noise.validate(cfg_.k);
  if (std::holds_alternative<MlcWeights>(cfg_.truth)) {
    const auto& W = std::get<MlcWeights>(cfg_.truth);
    if (W.k != cfg_.k || W.d != cfg_.d) throw ConfigError("SampleSource: truth shape");
  } else {
    const auto& H = std::get<HardInstanceSpec>(cfg_.truth);
    if (H.k != cfg_.k || H.d != cfg_.d) throw ConfigError("SampleSource: truth shape");
  }

  if (cfg_.noise.kind == NoiseKind::boundary_flip) {
    if (!std::holds_alternative<MlcWeights>(cfg_.truth))
      throw ConfigError("boundary_flip needs an MLC ground truth (margin undefined otherwise)");
    // Band-mass pre-pass on a fixed offset of the source seed, so the main
    // stream is untouched and the calibration replays with the run.
    const auto& W = std::get<MlcWeights>(cfg_.truth);
    Rng cal = Rng(cfg_.seed).derive(kCalibrationTag);
    long hits = 0;
    for (int s = 0; s < kCalibrationSamples; ++s) {
      const Eigen::VectorXd x = cal.gaussian_vector(cfg_.d);
      const int y = mlc_predict(W, x);
      if (multiclass_margin(W, x, y) < *cfg_.noise.band) ++hits;
    }
    band_mass_ = static_cast<double>(hits) / kCalibrationSamples;
    if (band_mass_ < kMinBandMass)
      throw CalibrationFailure("boundary_flip: band mass below 1e-6");
  }
}

int SampleSource::predict_clean(const Eigen::VectorXd& x) const {
  return ground_truth_predict(cfg_.truth, x);
}

int SampleSource::corrupt(int y_clean, const Eigen::VectorXd& x) {
  const NoiseSpec& noise = cfg_.noise;
  switch (noise.kind) {
    case NoiseKind::none:
      return y_clean;
    case NoiseKind::uniform_flip: {
      if (rng_.uniform01() < noise.rate) {
        const int offset = static_cast<int>(rng_.uniform_int(1, cfg_.k - 1));
        return 1 + (y_clean - 1 + offset) % cfg_.k;
      }
      return y_clean;
    }
    case NoiseKind::pair_confusion: {
      const auto [i, j] = *noise.pair;
      if ((y_clean == i || y_clean == j) && rng_.uniform01() < noise.rate)
        return y_clean == i ? j : i;
      return y_clean;
    }
    case NoiseKind::boundary_flip: {
      const auto& W = std::get<MlcWeights>(cfg_.truth);
      if (multiclass_margin(W, x, y_clean) >= *noise.band) return y_clean;
      const double p = std::min(1.0, noise.rate / band_mass_);
      if (rng_.uniform01() < p) return runner_up_class(W, x, y_clean);
      return y_clean;
    }
  }
  throw ConfigError("corrupt: unknown noise kind");
}

LabeledExample SampleSource::draw_one() {
  LabeledExample ex;
  draw_into(ex);
  return ex;
}

void SampleSource::draw_into(LabeledExample& ex) {
  if (ex.x.size() != cfg_.d) ex.x.resize(cfg_.d);
  for (int c = 0; c < cfg_.d; ++c) ex.x[c] = rng_.normal();
  ex.y = corrupt(predict_clean(ex.x), ex.x);
}

std::vector<LabeledExample> SampleSource::draw(int n) {
  if (n < 1) throw PreconditionViolated("draw: n >= 1");
  std::vector<LabeledExample> out;
  out.reserve(n);
  for (int s = 0; s < n; ++s) out.push_back(draw_one());
  return out;
}

SampleSource SampleSource::derived(std::uint64_t tag) const {
  SourceConfig cfg = cfg_;
  cfg.seed = Rng(cfg_.seed).derive(tag).seed();
  return SampleSource(std::move(cfg));
}

void save_dataset(const std::vector<LabeledExample>& examples, int d, int k,
                  const std::string& path) {
  std::ostringstream out;
  out << "gauss-mlc-dataset v1 d=" << d << " k=" << k << "\n";
  for (const auto& ex : examples) {
    if (ex.x.size() != d) throw DimensionMismatch("save_dataset: example dimension");
    out << ex.y;
    for (int c = 0; c < d; ++c) out << ' ' << fmt17(ex.x[c]);
    out << '\n';
  }
  write_text_file(path, out.str());
}

Dataset load_dataset(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) throw FormatError("dataset: missing header");
  Dataset ds;
  {
    std::istringstream hs(line);
    std::string magic, version, dfield, kfield;
    hs >> magic >> version >> dfield >> kfield;
    if (magic != "gauss-mlc-dataset" || version != "v1" ||
        dfield.rfind("d=", 0) != 0 || kfield.rfind("k=", 0) != 0)
      throw FormatError("dataset: bad header: " + line);
    try {
      ds.d = std::stoi(dfield.substr(2));
      ds.k = std::stoi(kfield.substr(2));
    } catch (const std::exception&) {
      throw FormatError("dataset: bad header numbers");
    }
    if (ds.d < 1 || ds.k < 2) throw FormatError("dataset: bad header numbers");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    LabeledExample ex;
    ex.x.resize(ds.d);
    if (!(ls >> ex.y)) throw FormatError("dataset: bad label line");
    for (int c = 0; c < ds.d; ++c)
      if (!(ls >> ex.x[c])) throw FormatError("dataset: truncated example line");
    double extra;
    if (ls >> extra) throw FormatError("dataset: trailing fields");
    if (ex.y < 1 || ex.y > ds.k) throw FormatError("dataset: label out of range");
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

}  // namespace gaussmlc
