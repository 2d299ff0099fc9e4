#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gaussmlc/learners.hpp"
#include "gaussmlc/lemma_lab.hpp"
#include "gaussmlc/regularity.hpp"

namespace py = pybind11;
using namespace gaussmlc;

namespace {

MlcWeights mlc_from_matrix(const Eigen::MatrixXd& rows) {
  std::vector<Eigen::VectorXd> w;
  for (int i = 0; i < rows.rows(); ++i) w.push_back(rows.row(i).transpose());
  return MlcWeights(static_cast<int>(rows.rows()), static_cast<int>(rows.cols()),
                    std::move(w));
}

PseudoMlcWeights pseudo_from_matrix(int k, const Eigen::MatrixXd& pairs) {
  std::vector<UnitVector> w;
  for (int p = 0; p < pairs.rows(); ++p) w.push_back(UnitVector(pairs.row(p).transpose()));
  return PseudoMlcWeights(k, static_cast<int>(pairs.cols()), std::move(w));
}

Eigen::MatrixXd pseudo_to_matrix(const PseudoMlcWeights& W) {
  Eigen::MatrixXd out(W.pairs.size(), W.d);
  for (std::size_t p = 0; p < W.pairs.size(); ++p) out.row(p) = W.pairs[p].vec();
  return out;
}

NoiseSpec noise_from_args(const std::string& kind, double rate, int pair_i, int pair_j,
                          double band) {
  switch (noise_kind_from_name(kind)) {
    case NoiseKind::none: return NoiseSpec::none_spec();
    case NoiseKind::uniform_flip: return NoiseSpec::uniform_flip(rate);
    case NoiseKind::pair_confusion: return NoiseSpec::pair_confusion(pair_i, pair_j, rate);
    case NoiseKind::boundary_flip: return NoiseSpec::boundary_flip(rate, band);
  }
  throw ConfigError("bad noise kind");
}

SourceConfig source_from_args(const Eigen::MatrixXd& truth_rows, const std::string& noise,
                              double rate, int pair_i, int pair_j, double band,
                              std::uint64_t seed) {
  SourceConfig cfg;
  cfg.k = static_cast<int>(truth_rows.rows());
  cfg.d = static_cast<int>(truth_rows.cols());
  cfg.truth = mlc_from_matrix(truth_rows);
  cfg.noise = noise_from_args(noise, rate, pair_i, pair_j, band);
  cfg.seed = seed;
  return cfg;
}

TrainConfig train_config(double epsilon, double delta, double big_c,
                         const std::string& preset, std::uint64_t seed, int threads,
                         long n_override, long t_override, long sel_override) {
  TrainConfig tc;
  tc.epsilon = epsilon;
  tc.delta = delta;
  tc.big_c = big_c;
  tc.preset = preset == "theory" ? Preset::theory : Preset::desk;
  tc.seed = seed;
  tc.threads = threads;
  if (n_override > 0) tc.n_override = n_override;
  if (t_override > 0) tc.t_override = t_override;
  if (sel_override > 0) tc.selection_n_override = sel_override;
  return tc;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gaussian multiclass linear classification lab (C++ core)";

  py::register_exception<Error>(m, "GaussMlcError");

  // geometry
  m.def("normalize", [](const Eigen::VectorXd& v) { return normalize(v).vec(); }, py::arg("v"));
  m.def("project_orthogonal",
        [](const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
          return project_orthogonal(v, UnitVector(w));
        },
        py::arg("v"), py::arg("w"));
  m.def("angle_between",
        [](const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
          return angle_between(UnitVector(u), UnitVector(v));
        },
        py::arg("u"), py::arg("v"));
  m.def("sphere_retract",
        [](const Eigen::VectorXd& w, double mu, const Eigen::VectorXd& g) {
          return sphere_retract(UnitVector(w), mu, g).vec();
        },
        py::arg("w"), py::arg("mu"), py::arg("g"));
  m.def("sample_gaussian",
        [](int d, std::uint64_t seed) { Rng rng(seed); return rng.gaussian_vector(d); },
        py::arg("d"), py::arg("seed"));
  m.def("sample_hyperplane_gaussian",
        [](const Eigen::VectorXd& w, std::uint64_t seed) {
          Rng rng(seed);
          return sample_hyperplane_gaussian(UnitVector(w), rng);
        },
        py::arg("w"), py::arg("seed"));
  m.def("localized_accept_prob",
        [](const Eigen::VectorXd& x, const Eigen::VectorXd& w, double sigma) {
          return localized_accept_prob(x, LocalizationSpec(UnitVector(w), sigma));
        },
        py::arg("x"), py::arg("w"), py::arg("sigma"));
  m.def("apply_localization",
        [](const Eigen::VectorXd& z, const Eigen::VectorXd& w, double sigma) {
          return apply_localization(z, LocalizationSpec(UnitVector(w), sigma));
        },
        py::arg("z"), py::arg("w"), py::arg("sigma"));
  m.def("halfspace_bias_bounds",
        [](double t) {
          const BiasBounds b = halfspace_bias_bounds(t);
          return std::make_pair(b.lower, b.upper);
        },
        py::arg("t"));
  m.def("gaussian_tail", &gaussian_tail, py::arg("t"));

  // model
  m.def("random_mlc",
        [](int k, int d, std::uint64_t seed) {
          Rng rng(seed);
          const MlcWeights W = MlcWeights::random_unit_rows(k, d, rng);
          Eigen::MatrixXd rows(k, d);
          for (int i = 0; i < k; ++i) rows.row(i) = W.rows[i];
          return rows;
        },
        py::arg("k"), py::arg("d"), py::arg("seed"));
  m.def("mlc_predict",
        [](const Eigen::MatrixXd& rows, const Eigen::VectorXd& x) {
          return mlc_predict(mlc_from_matrix(rows), x);
        },
        py::arg("weights"), py::arg("x"));
  m.def("pseudo_predict",
        [](int k, const Eigen::MatrixXd& pairs, const Eigen::VectorXd& x) {
          return pseudo_predict(pseudo_from_matrix(k, pairs), x);
        },
        py::arg("k"), py::arg("pairs"), py::arg("x"));
  m.def("hard_instance_predict",
        [](int k, const Eigen::VectorXd& x) {
          return hard_instance_predict(HardInstanceSpec(k, static_cast<int>(x.size())), x);
        },
        py::arg("k"), py::arg("x"));
  m.def("pairwise_boundary_direction",
        [](const Eigen::MatrixXd& rows, int i, int j) {
          return pairwise_boundary_direction(mlc_from_matrix(rows), i, j).vec();
        },
        py::arg("weights"), py::arg("i"), py::arg("j"));
  m.def("multiclass_margin",
        [](const Eigen::MatrixXd& rows, const Eigen::VectorXd& x, int y) {
          return multiclass_margin(mlc_from_matrix(rows), x, y);
        },
        py::arg("weights"), py::arg("x"), py::arg("y"));
  m.def("binary_margin",
        [](const Eigen::VectorXd& w, const Eigen::VectorXd& x, int y) {
          return binary_margin(UnitVector(w), x, y);
        },
        py::arg("w"), py::arg("x"), py::arg("y"));

  // data
  m.def("draw_dataset",
        [](const Eigen::MatrixXd& truth_rows, const std::string& noise, double rate,
           int pair_i, int pair_j, double band, std::uint64_t seed, int n) {
          SampleSource source(source_from_args(truth_rows, noise, rate, pair_i, pair_j,
                                               band, seed));
          Eigen::MatrixXd x(n, truth_rows.cols());
          std::vector<int> y(n);
          LabeledExample ex;
          for (int s = 0; s < n; ++s) {
            source.draw_into(ex);
            x.row(s) = ex.x;
            y[s] = ex.y;
          }
          return std::make_pair(x, y);
        },
        py::arg("truth"), py::arg("noise") = "none", py::arg("rate") = 0.0,
        py::arg("pair_i") = 1, py::arg("pair_j") = 2, py::arg("band") = 0.05,
        py::arg("seed") = 0, py::arg("n") = 1000);

  // learners
  m.def("train_aggregate",
        [](const Eigen::MatrixXd& truth_rows, const std::string& learner,
           const std::string& noise, double rate, int pair_i, int pair_j, double band,
           std::uint64_t source_seed, double epsilon, double delta, double big_c,
           const std::string& preset, std::uint64_t seed, int threads, long n_override,
           long t_override, long sel_override, bool oracle_geometry) {
          const SourceConfig cfg = source_from_args(truth_rows, noise, rate, pair_i,
                                                    pair_j, band, source_seed);
          SampleSource source(cfg);
          const TrainConfig tc = train_config(epsilon, delta, big_c, preset, seed, threads,
                                              n_override, t_override, sel_override);
          GeometryOracle oracle = nullptr;
          const LearnerKind kind = learner_kind_from_name(learner);
          if (kind == LearnerKind::localk && oracle_geometry) {
            const MlcWeights W = std::get<MlcWeights>(cfg.truth);
            oracle = [W, seed](int i, int j) {
              Rng r = Rng(seed).derive(0x6E0 + i * 64 + j);
              const MassEstimate mass = boundary_mass_estimate(W, i, j, 20000, r);
              const CriticalAngle angle = critical_angle(W, i, j);
              return GeometryGuess{std::clamp(mass.t_hat, 1e-3, 1.0),
                                   std::clamp(angle.phi, 1e-3, 1.0)};
            };
          }
          const AggregateResult agg = aggregate_train(source, tc, kind, oracle);
          py::dict out;
          out["k"] = agg.weights.k;
          out["pairs"] = pseudo_to_matrix(agg.weights);
          py::list sel_errs;
          for (const auto& rep : agg.pair_reports)
            sel_errs.append(py::make_tuple(rep.i, rep.j, rep.result.selection_err.value));
          out["selection_errs"] = sel_errs;
          return out;
        },
        py::arg("truth"), py::arg("learner") = "init", py::arg("noise") = "none",
        py::arg("rate") = 0.0, py::arg("pair_i") = 1, py::arg("pair_j") = 2,
        py::arg("band") = 0.05, py::arg("source_seed") = 0, py::arg("epsilon") = 0.05,
        py::arg("delta") = 0.1, py::arg("big_c") = 10.0, py::arg("preset") = "desk",
        py::arg("seed") = 0, py::arg("threads") = 1, py::arg("n_override") = 0,
        py::arg("t_override") = 0, py::arg("sel_override") = 0,
        py::arg("oracle_geometry") = false);
  m.def("train_perceptron",
        [](const Eigen::MatrixXd& truth_rows, const std::string& noise, double rate,
           int pair_i, int pair_j, double band, std::uint64_t source_seed, long n,
           std::uint64_t seed) {
          SampleSource source(source_from_args(truth_rows, noise, rate, pair_i, pair_j,
                                               band, source_seed));
          Rng init_rng(seed);
          const PerceptronResult res = perceptron_train(source, n, init_rng);
          Eigen::MatrixXd rows(res.weights.k, res.weights.d);
          for (int i = 0; i < res.weights.k; ++i) rows.row(i) = res.weights.rows[i];
          return std::make_pair(rows, res.mistakes);
        },
        py::arg("truth"), py::arg("noise") = "none", py::arg("rate") = 0.0,
        py::arg("pair_i") = 1, py::arg("pair_j") = 2, py::arg("band") = 0.05,
        py::arg("source_seed") = 0, py::arg("n") = 10000, py::arg("seed") = 0);

  // regularity
  m.def("critical_angle",
        [](const Eigen::MatrixXd& rows, int i, int j) {
          const CriticalAngle angle = critical_angle(mlc_from_matrix(rows), i, j);
          return std::make_pair(angle.theta_star, angle.phi);
        },
        py::arg("weights"), py::arg("i"), py::arg("j"));
  m.def("boundary_mass",
        [](const Eigen::MatrixXd& rows, int i, int j, long n_mc, std::uint64_t seed) {
          Rng rng(seed);
          const MassEstimate est = boundary_mass_estimate(mlc_from_matrix(rows), i, j,
                                                          n_mc, rng);
          return std::make_pair(est.t_hat, est.ci_radius);
        },
        py::arg("weights"), py::arg("i"), py::arg("j"), py::arg("n_mc") = 100000,
        py::arg("seed") = 0);

  // lemma lab
  m.def("pgd_inequality_check",
        [](const Eigen::VectorXd& w_star, const Eigen::VectorXd& w_t,
           const Eigen::VectorXd& g_hat, const Eigen::VectorXd& g, double mu) {
          return pgd_inequality_check(UnitVector(w_star), UnitVector(w_t), g_hat, g, mu)
              .pass;
        },
        py::arg("w_star"), py::arg("w_t"), py::arg("g_hat"), py::arg("g"), py::arg("mu"));
  m.def("correlation_bound_check",
        [](const Eigen::VectorXd& w, long n_mc, std::uint64_t seed) {
          Rng rng(seed);
          const CheckResult res =
              correlation_bound_check(UnitVector(w), EventSpec::halfspace_cap(), n_mc, rng);
          return py::make_tuple(res.lhs, res.rhs, res.pass);
        },
        py::arg("w"), py::arg("n_mc") = 100000, py::arg("seed") = 0);
}
