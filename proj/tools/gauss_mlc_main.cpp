#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gaussmlc/learners.hpp"
#include "gaussmlc/lemma_lab.hpp"
#include "gaussmlc/regularity.hpp"
#include "gaussmlc/report_io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace gaussmlc;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "gauss-mlc 1.0.0";

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct SourceFlags {
  int d = 20;
  int k = 3;
  std::string truth = "random-mlc";  // random-mlc | hard
  std::uint64_t truth_seed = 1;
  std::string noise = "none";
  double rate = 0.0;
  int pair_i = 1;
  int pair_j = 2;
  double band = 0.05;
};

struct CommonFlags {
  std::uint64_t seed = 0;
  int threads = 0;  // 0: use GAUSS_MLC_THREADS or 1
  std::string out_dir = ".";
  std::string config_path;
};

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("GAUSS_MLC_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

NoiseSpec make_noise(const SourceFlags& f) {
  const NoiseKind kind = noise_kind_from_name(f.noise);
  switch (kind) {
    case NoiseKind::none: return NoiseSpec::none_spec();
    case NoiseKind::uniform_flip: return NoiseSpec::uniform_flip(f.rate);
    case NoiseKind::pair_confusion: return NoiseSpec::pair_confusion(f.pair_i, f.pair_j, f.rate);
    case NoiseKind::boundary_flip: return NoiseSpec::boundary_flip(f.rate, f.band);
  }
  throw ConfigError("bad noise kind");
}

SourceConfig make_source(const SourceFlags& f, std::uint64_t seed) {
  SourceConfig cfg;
  cfg.d = f.d;
  cfg.k = f.k;
  if (f.truth == "random-mlc") {
    Rng rng(f.truth_seed);
    cfg.truth = MlcWeights::random_unit_rows(f.k, f.d, rng);
  } else if (f.truth == "hard") {
    cfg.truth = HardInstanceSpec(f.k, f.d);
  } else {
    throw ConfigError("truth must be random-mlc or hard");
  }
  cfg.noise = make_noise(f);
  cfg.seed = seed;
  return cfg;
}

json source_echo(const SourceFlags& f, std::uint64_t seed) {
  return json{{"d", f.d},           {"k", f.k},
              {"truth", f.truth},   {"truth_seed", f.truth_seed},
              {"noise", f.noise},   {"rate", f.rate},
              {"pair_i", f.pair_i}, {"pair_j", f.pair_j},
              {"band", f.band},     {"seed", seed}};
}

/// Fail-closed config loading: "version" required, unknown keys rejected.
json load_config(const std::string& path, const std::vector<std::string>& allowed) {
  json cfg;
  try {
    cfg = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse: ") + e.what());
  }
  if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
  if (!cfg.contains("version")) throw ConfigError("config missing required 'version'");
  if (cfg["version"].get<int>() != 1) throw ConfigError("unsupported config version");
  for (const auto& [key, value] : cfg.items()) {
    if (key == "version") continue;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("unknown config key: " + key);
  }
  return cfg;
}

template <typename T>
void maybe_set(const json& cfg, const char* key, T& slot) {
  if (cfg.contains(key)) slot = cfg.at(key).get<T>();
}

const std::vector<std::string> kSourceKeys = {"d",      "k",      "truth", "truth_seed",
                                              "noise",  "rate",   "pair_i", "pair_j",
                                              "band",   "seed",   "threads", "out_dir"};

void apply_source_config(const json& cfg, SourceFlags& src, CommonFlags& common) {
  maybe_set(cfg, "d", src.d);
  maybe_set(cfg, "k", src.k);
  maybe_set(cfg, "truth", src.truth);
  maybe_set(cfg, "truth_seed", src.truth_seed);
  maybe_set(cfg, "noise", src.noise);
  maybe_set(cfg, "rate", src.rate);
  maybe_set(cfg, "pair_i", src.pair_i);
  maybe_set(cfg, "pair_j", src.pair_j);
  maybe_set(cfg, "band", src.band);
  maybe_set(cfg, "seed", common.seed);
  maybe_set(cfg, "threads", common.threads);
  maybe_set(cfg, "out_dir", common.out_dir);
}

void write_report(const std::string& out_dir, const json& report) {
  write_text_file(out_dir + "/report.json", report.dump(2) + "\n");
}

void ensure_out_dir(const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create out dir: " + out_dir);
}

json sizes_json(const LearnerSizes& s) {
  return json{{"n", s.n},
              {"t", s.t},
              {"n_sel", s.n_sel},
              {"restarts", s.restarts},
              {"mu", s.mu},
              {"eta_step", s.eta_step},
              {"phi0", s.phi0},
              {"sigma_floor", s.sigma_floor},
              {"grid_step", s.grid_step},
              {"max_draw_factor", s.max_draw_factor}};
}

void write_trace_csv(const std::string& path, const std::string& run_id,
                     const std::string& algo, const std::vector<PairTrainReport>& reports) {
  // wall_ms stays 0 in the CSV: per-row timing would break the byte-identical
  // rerun contract; wall clock lives in report.json.
  CsvWriter csv({"run_id", "algo", "i", "j", "t", "sigma_t", "phi_t", "val_err", "wall_ms"});
  for (const auto& rep : reports)
    for (const auto& rec : rep.result.trace.records) {
      if (rec.block < 0) continue;
      csv.add_row({run_id, algo, CsvWriter::cell(rep.i), CsvWriter::cell(rep.j),
                   CsvWriter::cell(rec.t), CsvWriter::cell(rec.sigma_t),
                   CsvWriter::cell(rec.phi_t), CsvWriter::cell(rec.val_err),
                   CsvWriter::cell(0)});
    }
  csv.write(path);
}

struct TrainOutcome {
  json report;
  ErrorReport holdout_err;
};

TrainOutcome run_train(const std::string& algo, const SourceFlags& src_flags,
                       const CommonFlags& common, TrainConfig tc, long perceptron_n,
                       long holdout_n, const std::string& geometry_mode,
                       const std::string& out_dir, bool write_files) {
  const auto t0 = Clock::now();
  const SourceConfig source_cfg = make_source(src_flags, common.seed);
  SampleSource source(source_cfg);
  tc.seed = common.seed;
  tc.threads = resolve_threads(common.threads);

  json report;
  report["version"] = kVersion;
  report["command"] = "train";
  report["algo"] = algo;
  report["source"] = source_echo(src_flags, common.seed);
  report["train"] = {{"epsilon", tc.epsilon},
                     {"delta", tc.delta},
                     {"big_c", tc.big_c},
                     {"preset", tc.preset == Preset::desk ? "desk" : "theory"},
                     {"threads", tc.threads},
                     {"holdout_n", holdout_n}};
  if (tc.n_override) report["train"]["n_override"] = *tc.n_override;
  if (tc.t_override) report["train"]["t_override"] = *tc.t_override;
  if (tc.selection_n_override) report["train"]["selection_n_override"] = *tc.selection_n_override;

  Classifier hypothesis;
  ErrorReport holdout_err;
  if (algo == "perceptron") {
    Rng init_rng = Rng(common.seed).derive(0xF17);
    const PerceptronResult res = perceptron_train(source, perceptron_n, init_rng);
    report["perceptron"] = {{"n", perceptron_n}, {"mistakes", res.mistakes}};
    if (write_files) save_model_mlc(res.weights, out_dir + "/model.json");
    MlcWeights W = res.weights;
    hypothesis = [W](const Eigen::VectorXd& x) { return mlc_predict(W, x); };
  } else {
    LearnerKind kind;
    if (algo == "aggregate-init") kind = LearnerKind::init;
    else if (algo == "aggregate-local3") kind = LearnerKind::local3;
    else if (algo == "aggregate-localk") kind = LearnerKind::localk;
    else throw ConfigError("unknown algo: " + algo);

    GeometryOracle oracle = nullptr;
    if (kind == LearnerKind::localk && geometry_mode == "oracle") {
      if (!std::holds_alternative<MlcWeights>(source_cfg.truth))
        throw ConfigError("oracle geometry needs an MLC ground truth");
      const MlcWeights W = std::get<MlcWeights>(source_cfg.truth);
      const std::uint64_t seed = common.seed;
      oracle = [W, seed](int i, int j) {
        Rng r = Rng(seed).derive(0x6E0 + i * 64 + j);
        const MassEstimate mass = boundary_mass_estimate(W, i, j, 20000, r);
        const CriticalAngle angle = critical_angle(W, i, j);
        return GeometryGuess{std::clamp(mass.t_hat, 1e-3, 1.0),
                             std::clamp(angle.phi, 1e-3, 1.0)};
      };
    }
    const AggregateResult agg = aggregate_train(source, tc, kind, oracle);
    if (write_files) {
      save_model_pseudo(agg.weights, out_dir + "/model.json");
      write_trace_csv(out_dir + "/trace.csv", std::to_string(common.seed), algo,
                      agg.pair_reports);
      CsvWriter pairs_csv({"i", "j", "selection_err", "selection_n", "max_grad_norm"});
      for (const auto& rep : agg.pair_reports) {
        double mx = 0.0;
        for (const auto& rec : rep.result.trace.records) mx = std::max(mx, rec.grad_norm);
        pairs_csv.add_row({CsvWriter::cell(rep.i), CsvWriter::cell(rep.j),
                           CsvWriter::cell(rep.result.selection_err.value),
                           CsvWriter::cell(static_cast<long long>(rep.result.selection_err.n)),
                           CsvWriter::cell(mx)});
      }
      pairs_csv.write(out_dir + "/pairs.csv");
    }
    json pairs = json::array();
    for (const auto& rep : agg.pair_reports)
      pairs.push_back(json{{"i", rep.i},
                           {"j", rep.j},
                           {"selection_err", rep.result.selection_err.value},
                           {"sizes", sizes_json(rep.result.trace.sizes)}});
    report["pairs"] = pairs;
    if (!agg.pair_reports.empty())
      report["sizes"] = sizes_json(agg.pair_reports[0].result.trace.sizes);
    PseudoMlcWeights W = agg.weights;
    hypothesis = [W](const Eigen::VectorXd& x) { return pseudo_predict(W, x); };
  }

  SampleSource holdout = source.derived(0x401D0);
  const auto sample = holdout.draw(holdout_n);
  holdout_err = err(hypothesis, sample);
  report["holdout"] = {{"err", holdout_err.value},
                       {"n", holdout_err.n},
                       {"std_err", holdout_err.std_err}};
  report["wall_ms"] = ms_since(t0);
  return {report, holdout_err};
}

int cmd_gen_data(const SourceFlags& src_flags, const CommonFlags& common, long n) {
  ensure_out_dir(common.out_dir);
  const SourceConfig cfg = make_source(src_flags, common.seed);
  SampleSource source(cfg);
  const auto examples = source.draw(n);
  save_dataset(examples, cfg.d, cfg.k, common.out_dir + "/dataset.txt");
  if (std::holds_alternative<MlcWeights>(cfg.truth))
    save_model_mlc(std::get<MlcWeights>(cfg.truth), common.out_dir + "/truth_model.json");
  json report{{"version", kVersion},
              {"command", "gen-data"},
              {"source", source_echo(src_flags, common.seed)},
              {"n", n},
              {"band_mass", source.band_mass()}};
  write_report(common.out_dir, report);
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_path,
             const CommonFlags& common) {
  ensure_out_dir(common.out_dir);
  const ModelFile model = load_model(model_path);
  const Dataset ds = load_dataset(data_path);
  if (ds.examples.empty()) throw EmptySample("eval: dataset has no examples");
  Classifier h;
  if (model.is_mlc) {
    MlcWeights W = model.mlc;
    h = [W](const Eigen::VectorXd& x) { return mlc_predict(W, x); };
  } else {
    PseudoMlcWeights W = model.pseudo;
    h = [W](const Eigen::VectorXd& x) { return pseudo_predict(W, x); };
  }
  const ErrorReport rep = err(h, ds.examples);
  CsvWriter csv({"model", "data", "err", "n", "std_err"});
  csv.add_row({model_path, data_path, CsvWriter::cell(rep.value),
               CsvWriter::cell(static_cast<long long>(rep.n)), CsvWriter::cell(rep.std_err)});
  csv.write(common.out_dir + "/error.csv");
  json report{{"version", kVersion},
              {"command", "eval"},
              {"model", model_path},
              {"data", data_path},
              {"err", rep.value},
              {"n", rep.n},
              {"std_err", rep.std_err}};
  write_report(common.out_dir, report);
  return 0;
}

int cmd_geometry(const SourceFlags& src_flags, const CommonFlags& common, long n_mc,
                 int trials) {
  ensure_out_dir(common.out_dir);
  json report{{"version", kVersion}, {"command", "geometry"}};
  if (trials <= 1) {
    if (src_flags.truth != "random-mlc") throw ConfigError("geometry needs an MLC truth");
    Rng wr(src_flags.truth_seed);
    const MlcWeights W = MlcWeights::random_unit_rows(src_flags.k, src_flags.d, wr);
    Rng mc(common.seed);
    const RegularityReport rep = regularity_report(W, n_mc, mc);
    write_text_file(common.out_dir + "/geometry.json", regularity_to_json(rep) + "\n");
    CsvWriter csv({"i", "j", "t_hat", "ci", "theta_star", "phi"});
    for (const auto& pg : rep.pairs)
      csv.add_row({CsvWriter::cell(pg.i), CsvWriter::cell(pg.j), CsvWriter::cell(pg.t_hat),
                   CsvWriter::cell(pg.ci),
                   pg.theta_star ? CsvWriter::cell(*pg.theta_star) : "",
                   pg.phi ? CsvWriter::cell(*pg.phi) : ""});
    csv.write(common.out_dir + "/geometry.csv");
    report["pairs"] = json::parse(regularity_to_json(rep))["pairs"];
  } else {
    Rng mc(common.seed);
    const RegularitySummary summary =
        random_mlc_regularity(src_flags.k, src_flags.d, trials, n_mc, mc);
    CsvWriter csv({"trial", "min_phi", "min_t_hat", "min_t_ci"});
    for (int t = 0; t < trials; ++t)
      csv.add_row({CsvWriter::cell(t), CsvWriter::cell(summary.per_trial[t].min_phi),
                   CsvWriter::cell(summary.per_trial[t].min_t_hat),
                   CsvWriter::cell(summary.per_trial[t].min_t_ci)});
    csv.write(common.out_dir + "/geometry.csv");
    report["summary"] = {{"k", summary.k},
                         {"d", summary.d},
                         {"trials", summary.trials},
                         {"n_mc", summary.n_mc},
                         {"min_phi", summary.min_phi},
                         {"min_t_hat", summary.min_t_hat},
                         {"trials_with_phi_one", summary.trials_with_phi_one}};
  }
  write_report(common.out_dir, report);
  return 0;
}

int cmd_lowerbound(const CommonFlags& common, int k, int l, double eps,
                   const std::string& schedule_str, int trials) {
  ensure_out_dir(common.out_dir);
  std::vector<long> schedule;
  std::istringstream ss(schedule_str);
  std::string tok;
  while (std::getline(ss, tok, ',')) schedule.push_back(std::stol(tok));
  if (schedule.empty()) throw ConfigError("empty n schedule");
  Rng rng(common.seed);
  const auto rows = perceptron_lowerbound_experiment(k, l, eps, schedule, trials, rng,
                                                     resolve_threads(common.threads));
  CsvWriter csv({"n", "median_err", "frac_at_least_threshold"});
  CsvWriter plot({"n", "median_err"});
  for (const auto& row : rows) {
    csv.add_row({CsvWriter::cell(static_cast<long long>(row.n)),
                 CsvWriter::cell(row.median_err), CsvWriter::cell(row.frac_at_least)});
    plot.add_row({CsvWriter::cell(static_cast<long long>(row.n)),
                  CsvWriter::cell(row.median_err)});
  }
  csv.write(common.out_dir + "/lowerbound.csv");
  plot.write(common.out_dir + "/lowerbound_plot.csv");
  json report{{"version", kVersion},
              {"command", "lowerbound"},
              {"k", k},
              {"l", l},
              {"eps", eps},
              {"trials", trials},
              {"threshold", eps / std::pow(2.0, 2 * l)},
              {"seed", common.seed}};
  write_report(common.out_dir, report);
  return 0;
}

int cmd_lemma_lab(const CommonFlags& common, const std::string& suite, int trials,
                  long n_mc) {
  ensure_out_dir(common.out_dir);
  Rng rng(common.seed);
  CsvWriter csv({"suite", "case", "lhs", "rhs", "margin", "pass", "n_mc", "std_err"});
  long failures = 0;
  auto add = [&](const std::string& name, int idx, const CheckResult& res) {
    csv.add_row({name, CsvWriter::cell(idx), CsvWriter::cell(res.lhs),
                 CsvWriter::cell(res.rhs), CsvWriter::cell(res.margin),
                 res.pass ? "1" : "0", CsvWriter::cell(static_cast<long long>(res.n_mc)),
                 CsvWriter::cell(res.std_err)});
    if (!res.pass) ++failures;
  };

  if (suite == "correlation" || suite == "all") {
    for (int t = 0; t < trials; ++t) {
      Rng local = rng.derive(100000 + t);
      const int d = 3 + static_cast<int>(local.uniform_int(0, 12));
      const UnitVector w(local.unit_vector(d));
      const UnitVector u = normalize(project_orthogonal(local.gaussian_vector(d), w));
      EventSpec event = EventSpec::halfspace_cap();
      if (t % 3 == 1) event = EventSpec::wedge(u);
      if (t % 3 == 2) {
        const double lo = local.normal();
        event = EventSpec::band(u, lo, lo + 0.2 + std::abs(local.normal()));
      }
      Rng mc = local.derive(1);
      add("correlation", t, correlation_bound_check(w, event, n_mc, mc));
    }
  }
  if (suite == "pgd" || suite == "all") {
    for (int t = 0; t < trials; ++t) {
      Rng local = rng.derive(200000 + t);
      const int d = 2 + static_cast<int>(local.uniform_int(0, 10));
      const UnitVector w_star(local.unit_vector(d));
      const UnitVector w_t(local.unit_vector(d));
      const Eigen::VectorXd g = project_orthogonal(local.gaussian_vector(d), w_t);
      Eigen::VectorXd g_hat = g;
      if (t % 2 == 1) g_hat = project_orthogonal(local.gaussian_vector(d) * 4.0, w_t);
      add("pgd", t, pgd_inequality_check(w_star, w_t, g_hat, g,
                                         std::abs(local.normal()) * 0.5 + 1e-4));
    }
  }
  if (suite == "blowup" || suite == "all") {
    for (int t = 0; t < trials; ++t) {
      Rng local = rng.derive(300000 + t);
      const int k = 3 + static_cast<int>(local.uniform_int(0, 2));
      const int d = k + 2;
      const double eps = 0.05 + 0.15 * local.uniform01();
      const double c = 0.2 + local.uniform01();
      std::vector<Eigen::VectorXd> weights(k, Eigen::VectorXd::Zero(d));
      double prev = c / std::tan(eps * (0.4 + 0.5 * local.uniform01()));
      weights[k - 2][k - 2] = prev;
      weights[k - 2][k - 1] = c;
      for (int i = k - 3; i >= 0; --i) {
        weights[i][i] = (prev / std::tan(eps * (0.4 + 0.5 * local.uniform01()))) *
                        (1.0 + 0.5 * local.uniform01());
        prev = weights[i][i];
      }
      add("blowup", t, weight_blowup_check(weights, c, eps));
    }
  }
  if (suite == "localization" || suite == "all") {
    const double big_c = 4.0;
    for (int t = 0; t < trials; ++t) {
      Rng local = rng.derive(400000 + t);
      const int d = 8;
      const UnitVector u(local.unit_vector(d));
      const double alpha = (0.1 + 0.9 * local.uniform01()) / (16.0 * big_c);
      const Eigen::VectorXd pw =
          normalize(project_orthogonal(local.gaussian_vector(d), u)).vec();
      const UnitVector w = normalize(std::sqrt(1.0 - alpha * alpha) * u.vec() + alpha * pw);
      const double theta_v = local.uniform01() * M_PI / 2.0;
      const Eigen::VectorXd pv =
          normalize(project_orthogonal(local.gaussian_vector(d), u)).vec();
      const UnitVector v = normalize(std::cos(theta_v) * u.vec() + std::sin(theta_v) * pv);
      add("localization", t, localization_angle_check(u, v, w, big_c, 0.0));
    }
  }
  if (suite == "disagreement" || suite == "all") {
    for (int t = 0; t < trials; ++t) {
      Rng local = rng.derive(500000 + t);
      const MlcWeights W = MlcWeights::random_unit_rows(2, 10, local);
      const UnitVector w12 = pairwise_boundary_direction(W, 1, 2);
      const double theta = 0.1 + 1.3 * local.uniform01();
      const Eigen::VectorXd perp =
          normalize(project_orthogonal(local.gaussian_vector(10), w12)).vec();
      const UnitVector w = normalize(std::cos(theta) * w12.vec() + std::sin(theta) * perp);
      Rng mc = local.derive(7);
      add("disagreement", t, disagreement_mass(W, w, 1, 2, {}, n_mc, mc).check);
    }
  }
  csv.write(common.out_dir + "/checks.csv");
  json report{{"version", kVersion}, {"command", "lemma-lab"}, {"suite", suite},
              {"trials", trials},   {"n_mc", n_mc},           {"failures", failures},
              {"seed", common.seed}};
  write_report(common.out_dir, report);
  return failures == 0 ? 0 : 3;
}

int cmd_compare(const std::string& algo_a, const std::string& algo_b,
                const SourceFlags& src_flags, const CommonFlags& common, TrainConfig tc,
                int n_seeds, long holdout_n) {
  ensure_out_dir(common.out_dir);
  if (algo_a == "perceptron" || algo_b == "perceptron")
    throw ConfigError("compare supports aggregate algos only");
  CsvWriter csv({"seed", "err_a", "err_b", "diff"});
  int a_wins = 0;
  json rows = json::array();
  for (int s = 0; s < n_seeds; ++s) {
    CommonFlags seeded = common;
    seeded.seed = Rng(common.seed).derive(s).seed();
    const TrainOutcome a = run_train(algo_a, src_flags, seeded, tc, 0, holdout_n, "grid",
                                     common.out_dir, false);
    const TrainOutcome b = run_train(algo_b, src_flags, seeded, tc, 0, holdout_n, "grid",
                                     common.out_dir, false);
    const double diff = a.holdout_err.value - b.holdout_err.value;
    if (a.holdout_err.value <= b.holdout_err.value) ++a_wins;
    csv.add_row({CsvWriter::cell(s), CsvWriter::cell(a.holdout_err.value),
                 CsvWriter::cell(b.holdout_err.value), CsvWriter::cell(diff)});
    rows.push_back(json{{"seed", s},
                        {"err_a", a.holdout_err.value},
                        {"err_b", b.holdout_err.value},
                        {"diff", diff}});
  }
  csv.write(common.out_dir + "/compare.csv");
  json report{{"version", kVersion},
              {"command", "compare"},
              {"algo_a", algo_a},
              {"algo_b", algo_b},
              {"source", source_echo(src_flags, common.seed)},
              {"seeds", n_seeds},
              {"rows", rows},
              {"sign_test", {{"a_wins", a_wins}, {"n", n_seeds}}}};
  write_report(common.out_dir, report);
  return 0;
}

void add_source_flags(CLI::App* app, SourceFlags& src) {
  app->add_option("--d", src.d, "ambient dimension");
  app->add_option("--k", src.k, "number of classes");
  app->add_option("--truth", src.truth, "random-mlc | hard");
  app->add_option("--truth-seed", src.truth_seed, "seed for the planted weights");
  app->add_option("--noise", src.noise, "none|uniform_flip|pair_confusion|boundary_flip");
  app->add_option("--rate", src.rate, "noise rate eta");
  app->add_option("--pair-i", src.pair_i, "pair_confusion first label");
  app->add_option("--pair-j", src.pair_j, "pair_confusion second label");
  app->add_option("--band", src.band, "boundary_flip margin band tau");
}

void add_common_flags(CLI::App* app, CommonFlags& common) {
  app->add_option("--seed", common.seed, "run seed");
  app->add_option("--threads", common.threads, "worker threads (env GAUSS_MLC_THREADS)");
  app->add_option("--out-dir", common.out_dir, "output directory");
  app->add_option("--config", common.config_path, "JSON config file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic-experiment lab for robust multiclass linear classification "
               "under Gaussian marginals"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SourceFlags src;
  CommonFlags common;
  TrainConfig tc;
  std::string algo = "aggregate-init";
  std::string geometry_mode = "grid";
  std::string preset = "desk";
  long perceptron_n = 10000;
  long holdout_n = 100000;
  long gen_n = 1000;
  long n_mc = 100000;
  int trials = 1;
  std::string model_path, data_path;
  int kk = 10, ll = 4;
  double lb_eps = 1.0 / 16.0;
  std::string schedule = "0,1000,10000,100000";
  std::string suite = "all";
  std::string algo_b = "aggregate-local3";
  int n_seeds = 5;
  long n_override = 0, t_override = 0, sel_override = 0;

  CLI::App* gen = app.add_subcommand("gen-data", "write a labeled dataset");
  add_source_flags(gen, src);
  add_common_flags(gen, common);
  gen->add_option("--n", gen_n, "number of examples");

  CLI::App* train = app.add_subcommand("train", "train a classifier on a synthetic source");
  add_source_flags(train, src);
  add_common_flags(train, common);
  train->add_option("--algo", algo, "perceptron|aggregate-init|aggregate-local3|aggregate-localk");
  train->add_option("--eps", tc.epsilon, "accuracy parameter");
  train->add_option("--delta", tc.delta, "confidence parameter");
  train->add_option("--big-c", tc.big_c, "the constant C");
  train->add_option("--preset", preset, "desk | theory");
  train->add_option("--geometry", geometry_mode, "localk mode: oracle | grid");
  train->add_option("--perceptron-n", perceptron_n, "perceptron online examples");
  train->add_option("--holdout-n", holdout_n, "holdout sample for the error report");
  train->add_option("--n-override", n_override, "per-run example budget");
  train->add_option("--t-override", t_override, "iterations per restart/grid cell");
  train->add_option("--sel-override", sel_override, "selection sample size");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a saved model on a dataset");
  add_common_flags(eval, common);
  eval->add_option("--model", model_path, "model json")->required();
  eval->add_option("--data", data_path, "dataset file")->required();

  CLI::App* geo = app.add_subcommand("geometry", "decision-boundary geometry report");
  add_source_flags(geo, src);
  add_common_flags(geo, common);
  geo->add_option("--n-mc", n_mc, "Monte Carlo samples per pair");
  geo->add_option("--trials", trials, "random-MLC trials (1: single planted report)");

  CLI::App* lb = app.add_subcommand("lowerbound", "perceptron hard-instance sweep");
  add_common_flags(lb, common);
  lb->add_option("--k", kk, "classes (d = k)");
  lb->add_option("--l", ll, "effective class depth");
  lb->add_option("--eps", lb_eps, "epsilon in (0, 1/l^2]");
  lb->add_option("--n-schedule", schedule, "comma-separated sample sizes");
  lb->add_option("--trials", trials, "trials per schedule point");

  CLI::App* lab = app.add_subcommand("lemma-lab", "numerical checks of the structural results");
  add_common_flags(lab, common);
  lab->add_option("--suite", suite, "correlation|pgd|blowup|localization|disagreement|all");
  lab->add_option("--trials", trials, "cases per suite");
  lab->add_option("--n-mc", n_mc, "Monte Carlo samples per case");

  CLI::App* cmp = app.add_subcommand("compare", "paired comparison of two aggregate algos");
  add_source_flags(cmp, src);
  add_common_flags(cmp, common);
  cmp->add_option("--algo-a", algo, "first algorithm");
  cmp->add_option("--algo-b", algo_b, "second algorithm");
  cmp->add_option("--eps", tc.epsilon, "accuracy parameter");
  cmp->add_option("--delta", tc.delta, "confidence parameter");
  cmp->add_option("--seeds", n_seeds, "number of paired seeds");
  cmp->add_option("--holdout-n", holdout_n, "holdout sample size");
  cmp->add_option("--n-override", n_override, "per-run example budget");
  cmp->add_option("--t-override", t_override, "iterations per restart/grid cell");
  cmp->add_option("--sel-override", sel_override, "selection sample size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    // config files replace flag values; unknown keys are rejected
    if (!common.config_path.empty()) {
      std::vector<std::string> allowed = kSourceKeys;
      for (const char* key :
           {"algo", "algo_b", "eps", "delta", "big_c", "preset", "geometry", "perceptron_n",
            "holdout_n", "n", "n_mc", "trials", "model", "data", "l", "n_schedule", "suite",
            "seeds", "n_override", "t_override", "sel_override"})
        allowed.push_back(key);
      const json cfg = load_config(common.config_path, allowed);
      apply_source_config(cfg, src, common);
      maybe_set(cfg, "algo", algo);
      maybe_set(cfg, "algo_b", algo_b);
      maybe_set(cfg, "eps", tc.epsilon);
      maybe_set(cfg, "delta", tc.delta);
      maybe_set(cfg, "big_c", tc.big_c);
      maybe_set(cfg, "preset", preset);
      maybe_set(cfg, "geometry", geometry_mode);
      maybe_set(cfg, "perceptron_n", perceptron_n);
      maybe_set(cfg, "holdout_n", holdout_n);
      maybe_set(cfg, "n", gen_n);
      maybe_set(cfg, "n_mc", n_mc);
      maybe_set(cfg, "trials", trials);
      maybe_set(cfg, "model", model_path);
      maybe_set(cfg, "data", data_path);
      maybe_set(cfg, "l", ll);
      maybe_set(cfg, "n_schedule", schedule);
      maybe_set(cfg, "suite", suite);
      maybe_set(cfg, "seeds", n_seeds);
      maybe_set(cfg, "n_override", n_override);
      maybe_set(cfg, "t_override", t_override);
      maybe_set(cfg, "sel_override", sel_override);
    }
    if (preset == "desk") tc.preset = Preset::desk;
    else if (preset == "theory") tc.preset = Preset::theory;
    else throw ConfigError("preset must be desk or theory");
    if (n_override > 0) tc.n_override = n_override;
    if (t_override > 0) tc.t_override = t_override;
    if (sel_override > 0) tc.selection_n_override = sel_override;

    if (app.got_subcommand("gen-data")) return cmd_gen_data(src, common, gen_n);
    if (app.got_subcommand("train")) {
      ensure_out_dir(common.out_dir);
      const TrainOutcome outcome = run_train(algo, src, common, tc, perceptron_n,
                                             holdout_n, geometry_mode, common.out_dir, true);
      write_report(common.out_dir, outcome.report);
      std::cout << "holdout err " << fmt17(outcome.holdout_err.value) << "\n";
      return 0;
    }
    if (app.got_subcommand("eval")) return cmd_eval(model_path, data_path, common);
    if (app.got_subcommand("geometry")) return cmd_geometry(src, common, n_mc, trials);
    if (app.got_subcommand("lowerbound"))
      return cmd_lowerbound(common, kk, ll, lb_eps, schedule, trials);
    if (app.got_subcommand("lemma-lab")) return cmd_lemma_lab(common, suite, trials, n_mc);
    if (app.got_subcommand("compare"))
      return cmd_compare(algo, algo_b, src, common, tc, n_seeds, holdout_n);
    throw ConfigError("no subcommand");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const CLI::Error& e) {
    std::cerr << "cli error: " << e.get_name() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
