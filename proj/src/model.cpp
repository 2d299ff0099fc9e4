#include "gaussmlc/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "gaussmlc/report_io.hpp"
#include "json.hpp"

namespace gaussmlc {

namespace {

void check_label(int k, int y, const char* where) {
  if (y < 1 || y > k) throw DimensionMismatch(std::string(where) + ": label out of range");
}

void check_dim(int d, const Eigen::VectorXd& x, const char* where) {
  if (x.size() != d) throw DimensionMismatch(std::string(where) + ": dimension mismatch");
}

}  // namespace

MlcWeights::MlcWeights(int k_, int d_, std::vector<Eigen::VectorXd> rows_)
    : k(k_), d(d_), rows(std::move(rows_)) {
  if (k < 2 || d < 1) throw DimensionMismatch("MlcWeights: need k >= 2, d >= 1");
  if (static_cast<int>(rows.size()) != k) throw DimensionMismatch("MlcWeights: row count");
  bool all_same = true;
  for (const auto& w : rows) {
    if (w.size() != d) throw DimensionMismatch("MlcWeights: row dimension");
    if (!w.allFinite()) throw ZeroVector("MlcWeights: non-finite row");
    if ((w - rows[0]).norm() > 0) all_same = false;
  }
  if (all_same) throw DegeneratePair("MlcWeights: all rows identical, every score ties");
}

MlcWeights MlcWeights::random_unit_rows(int k, int d, Rng& rng) {
  std::vector<Eigen::VectorXd> rows;
  rows.reserve(k);
  for (int i = 0; i < k; ++i) rows.push_back(rng.unit_vector(d));
  return MlcWeights(k, d, std::move(rows));
}

PseudoMlcWeights::PseudoMlcWeights(int k_, int d_, std::vector<UnitVector> pairs_)
    : k(k_), d(d_), pairs(std::move(pairs_)) {
  if (k < 2 || d < 1) throw DimensionMismatch("PseudoMlcWeights: need k >= 2, d >= 1");
  if (static_cast<int>(pairs.size()) != k * (k - 1) / 2)
    throw DimensionMismatch("PseudoMlcWeights: need k(k-1)/2 pairs");
  for (const auto& w : pairs)
    if (w.dim() != d) throw DimensionMismatch("PseudoMlcWeights: pair dimension");
}

int PseudoMlcWeights::pair_index(int k, int i, int j) {
  if (!(1 <= i && i < j && j <= k)) throw DimensionMismatch("pair_index: need 1 <= i < j <= k");
  // pairs (1,2),(1,3),...,(1,k),(2,3),...
  const int a = i - 1, b = j - 1;
  return a * (2 * k - a - 1) / 2 + (b - a - 1);
}

const UnitVector& PseudoMlcWeights::pair(int i, int j) const {
  return pairs[pair_index(k, i, j)];
}

double PseudoMlcWeights::oriented_score(int i, int j, const Eigen::VectorXd& x) const {
  if (i < j) return pair(i, j).dot(x);
  return -pair(j, i).dot(x);
}

HardInstanceSpec::HardInstanceSpec(int k_, int d_) : k(k_), d(d_) {
  if (k < 2 || d < k) throw DimensionMismatch("HardInstanceSpec: need 2 <= k <= d");
}

int mlc_predict(const MlcWeights& W, const Eigen::VectorXd& x) {
  check_dim(W.d, x, "mlc_predict");
  int best = 1;
  double best_score = W.rows[0].dot(x);
  for (int i = 2; i <= W.k; ++i) {
    const double s = W.rows[i - 1].dot(x);
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  return best;
}

int pseudo_predict(const PseudoMlcWeights& W, const Eigen::VectorXd& x) {
  check_dim(W.d, x, "pseudo_predict");
  std::vector<int> votes(W.k, 0);
  for (int i = 1; i <= W.k; ++i)
    for (int j = i + 1; j <= W.k; ++j) {
      const double s = W.pair(i, j).dot(x);
      if (s >= 0.0) ++votes[i - 1];
      if (-s >= 0.0) ++votes[j - 1];
    }
  int best = 1;
  for (int i = 2; i <= W.k; ++i)
    if (votes[i - 1] > votes[best - 1]) best = i;
  return best;
}

UnitVector pairwise_boundary_direction(const MlcWeights& W, int i, int j) {
  check_label(W.k, i, "pairwise_boundary_direction");
  check_label(W.k, j, "pairwise_boundary_direction");
  if (i == j) throw DegeneratePair("pairwise_boundary_direction: i == j");
  const Eigen::VectorXd diff = W.rows[i - 1] - W.rows[j - 1];
  const double n = diff.norm();
  if (n < kZeroNormTol) throw DegeneratePair("pairwise_boundary_direction: w_i == w_j");
  return UnitVector(diff / n);
}

int hard_instance_predict(const HardInstanceSpec& spec, const Eigen::VectorXd& x) {
  if (x.size() < spec.k) throw DimensionMismatch("hard_instance_predict");
  for (int i = 1; i <= spec.k; ++i)
    if (x[i - 1] > 0.0) return i;
  return spec.k;
}

double multiclass_margin(const MlcWeights& W, const Eigen::VectorXd& x, int y) {
  check_dim(W.d, x, "multiclass_margin");
  check_label(W.k, y, "multiclass_margin");
  const double n = x.norm();
  if (n < kZeroNormTol) throw ZeroVector("multiclass_margin: x = 0");
  const double sy = W.rows[y - 1].dot(x);
  double gap = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= W.k; ++j) {
    if (j == y) continue;
    gap = std::min(gap, sy - W.rows[j - 1].dot(x));
  }
  return gap / n;
}

double binary_margin(const UnitVector& w, const Eigen::VectorXd& x, int y) {
  if (y != 1 && y != -1) throw PreconditionViolated("binary_margin: y must be +-1");
  const double n = x.norm();
  if (n < kZeroNormTol) throw ZeroVector("binary_margin: x = 0");
  return y * w.dot(x) / n;
}

int runner_up_class(const MlcWeights& W, const Eigen::VectorXd& x, int y) {
  check_dim(W.d, x, "runner_up_class");
  check_label(W.k, y, "runner_up_class");
  const double sy = W.rows[y - 1].dot(x);
  int best = -1;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= W.k; ++j) {
    if (j == y) continue;
    const double gap = sy - W.rows[j - 1].dot(x);
    if (gap < best_gap) {
      best_gap = gap;
      best = j;
    }
  }
  return best;
}

namespace {

// The model schema pins 17-significant-digit decimal reals, so the writer is
// hand-rolled; parsing goes through nlohmann::json.
void append_vector(std::ostringstream& out, const Eigen::VectorXd& w) {
  out << '[';
  for (int c = 0; c < w.size(); ++c) {
    if (c) out << ',';
    out << fmt17(w[c]);
  }
  out << ']';
}

Eigen::VectorXd vector_from_json(const nlohmann::json& arr, int d) {
  if (!arr.is_array() || static_cast<int>(arr.size()) != d)
    throw FormatError("model json: bad weight vector");
  Eigen::VectorXd w(d);
  for (int c = 0; c < d; ++c) w[c] = arr[c].get<double>();
  return w;
}

}  // namespace

std::string mlc_to_json(const MlcWeights& W) {
  std::ostringstream out;
  out << "{\"kind\":\"mlc\",\"k\":" << W.k << ",\"d\":" << W.d << ",\"weights\":[";
  for (int i = 0; i < W.k; ++i) {
    if (i) out << ',';
    append_vector(out, W.rows[i]);
  }
  out << "]}";
  return out.str();
}

std::string pseudo_to_json(const PseudoMlcWeights& W) {
  std::ostringstream out;
  out << "{\"kind\":\"pseudo\",\"k\":" << W.k << ",\"d\":" << W.d << ",\"pairs\":[";
  bool first = true;
  for (int i = 1; i <= W.k; ++i)
    for (int j = i + 1; j <= W.k; ++j) {
      if (!first) out << ',';
      first = false;
      out << "{\"i\":" << i << ",\"j\":" << j << ",\"w\":";
      append_vector(out, W.pair(i, j).vec());
      out << '}';
    }
  out << "]}";
  return out.str();
}

ModelFile model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model json: ") + e.what());
  }
  ModelFile out;
  try {
    const std::string kind = j.at("kind").get<std::string>();
    const int k = j.at("k").get<int>();
    const int d = j.at("d").get<int>();
    if (kind == "mlc") {
      const auto& rows = j.at("weights");
      if (static_cast<int>(rows.size()) != k) throw FormatError("model json: row count");
      std::vector<Eigen::VectorXd> w;
      for (const auto& r : rows) w.push_back(vector_from_json(r, d));
      out.is_mlc = true;
      out.mlc = MlcWeights(k, d, std::move(w));
    } else if (kind == "pseudo") {
      const auto& arr = j.at("pairs");
      std::vector<UnitVector> pairs(k * (k - 1) / 2, UnitVector(Eigen::VectorXd::Unit(d, 0)));
      std::vector<bool> seen(pairs.size(), false);
      for (const auto& p : arr) {
        const int i = p.at("i").get<int>();
        const int jj = p.at("j").get<int>();
        const int idx = PseudoMlcWeights::pair_index(k, i, jj);
        pairs[idx] = UnitVector(vector_from_json(p.at("w"), d));
        seen[idx] = true;
      }
      for (bool s : seen)
        if (!s) throw FormatError("model json: missing pair");
      out.is_mlc = false;
      out.pseudo = PseudoMlcWeights(k, d, std::move(pairs));
    } else {
      throw FormatError("model json: unknown kind " + kind);
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model json: ") + e.what());
  }
  return out;
}

void save_model_mlc(const MlcWeights& W, const std::string& path) {
  write_text_file(path, mlc_to_json(W) + "\n");
}

void save_model_pseudo(const PseudoMlcWeights& W, const std::string& path) {
  write_text_file(path, pseudo_to_json(W) + "\n");
}

ModelFile load_model(const std::string& path) { return model_from_json(read_text_file(path)); }

}  // namespace gaussmlc
