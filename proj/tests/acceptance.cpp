// Acceptance suite: one pass/fail line per criterion.
//
// Criteria 4 and 5 (and the real-dataset half of 3) need user-supplied CSVs;
// point SCNPLUS_DATA_DIR (or --data-dir) at a directory containing wine.csv,
// diabetes.csv and/or laser.csv — see tools/export_datasets.py. Without the
// flag those checks are reported as SKIP and the suite runs entirely on
// synthetic data.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "scnplus/experiment.hpp"
#include "scnplus/model_io.hpp"
#include "scnplus/solvers.hpp"
#include "scnplus/synthetic.hpp"
#include "scnplus/trainers.hpp"

using namespace scnplus;
namespace fs = std::filesystem;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
  Status status = Status::fail;
  std::string detail;
};

std::string data_dir_;

std::optional<fs::path> find_dataset(const std::string& name) {
  if (data_dir_.empty()) return std::nullopt;
  const fs::path p = fs::path(data_dir_) / name;
  if (fs::exists(p)) return p;
  return std::nullopt;
}

Matrix random_matrix(SplitStream& stream, int rows, int cols, double lo, double hi) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = stream.uniform(lo, hi);
  return m;
}

Vector random_vector(SplitStream& stream, int n, double lo, double hi) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = stream.uniform(lo, hi);
  return v;
}

// ----- criterion 1: solver-oracle equivalence ------------------------------

Outcome criterion_solver_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  SplitStream stream(20240601, 1);
  double worst_rel = 0.0;
  double worst_stationarity = 0.0;
  int solved = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = 2 + static_cast<int>(stream.below(49));     // N <= 50
    const int m = 1 + static_cast<int>(stream.below(4));      // m <= 4
    const Matrix e = random_matrix(stream, n, m, -2.0, 2.0);
    const Vector h = random_vector(stream, n, 0.0, 1.0);
    const Vector ht = random_vector(stream, n, 0.0, 1.0);
    const LupiParams p{stream.uniform(0.0, 10.0),
                       std::pow(10.0, stream.uniform(2.0, 6.0))};
    const auto w = lupi_beta(e, h, ht, p);
    if (!w) continue;
    ++solved;
    const Matrix joint = joint_solve(e, h, ht, p);
    Matrix closed(2, m);
    closed.row(0) = w->beta;
    closed.row(1) = w->beta_tilde;
    const double rel = (joint - closed).norm() / std::max(1.0, joint.norm());
    worst_rel = std::max(worst_rel, rel);

    for (int q = 0; q < m; ++q) {
      const Vector fit = h * w->beta[q] + ht * w->beta_tilde[q] - e.col(q);
      const double r1 = w->beta[q] + h.dot(fit);
      const double r2 = p.gamma * w->beta_tilde[q] + ht.dot(fit) + p.C * ht.sum();
      worst_stationarity = std::max({worst_stationarity, std::abs(r1), std::abs(r2)});
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::ostringstream d;
  d << solved << "/1000 instances solved, max rel diff " << worst_rel
    << ", max stationarity residual " << worst_stationarity << ", " << secs << " s";
  const bool ok = solved > 950 && worst_rel < 1e-8 && worst_stationarity < 1e-9 && secs < 10.0;
  return {ok ? Status::pass : Status::fail, d.str()};
}

// ----- criterion 2: contraction on sin(3x) ---------------------------------

Outcome criterion_contraction() {
  int supervised_nodes = 0;
  int violations = 0;
  int monotone_breaks = 0;
  double worst_excess = -1e300;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SyntheticData d = make_sin3x(200, seed);

    TrainConfig plus;
    plus.variant = Variant::scn_plus;
    plus.l_max = 200;
    plus.epsilon = 0.05;
    plus.seed = seed;
    const TrainResult rp = train(d.x, d.x_tilde, d.t, plus);
    for (const auto& diag : rp.report.node_diags) {
      if (diag.forced) continue;
      ++supervised_nodes;
      const double excess = diag.sq_norm_after -
                            ((diag.r_used + diag.mu_used) * diag.sq_norm_before + 1e-10);
      worst_excess = std::max(worst_excess, excess);
      if (excess > 0.0) ++violations;
    }

    TrainConfig scn;
    scn.variant = Variant::scn;
    scn.l_max = 200;
    scn.epsilon = 0.05;
    scn.seed = seed;
    const TrainResult rs = train(d.x, Matrix(), d.t, scn);
    double prev = std::sqrt(d.t.squaredNorm() / static_cast<double>(d.t.size()));
    for (double v : rs.report.rmse_history) {
      if (v > prev + 1e-12) ++monotone_breaks;
      prev = v;
    }
  }
  std::ostringstream d;
  d << supervised_nodes << " supervised SCN+ acceptances over 20 seeds, " << violations
    << " contraction violations (worst excess " << worst_excess << "), "
    << monotone_breaks << " SCN monotonicity breaks";
  const bool ok = violations == 0 && monotone_breaks == 0 && supervised_nodes > 100;
  return {ok ? Status::pass : Status::fail, d.str()};
}

// ----- criterion 3: structural economy --------------------------------------

Outcome criterion_structural_economy() {
  // Synthetic half: equal epsilon on sin(3x).
  double scn_nodes = 0.0, scn_plus_nodes = 0.0, irvfl_nodes = 0.0;
  const int seeds = 20;
  for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
    const SyntheticData d = make_sin3x(200, seed);
    TrainConfig cfg;
    cfg.epsilon = 0.05;
    cfg.seed = seed;
    cfg.l_max = 400;

    cfg.variant = Variant::scn;
    scn_nodes += train(d.x, Matrix(), d.t, cfg).report.final_l;
    cfg.variant = Variant::scn_plus;
    scn_plus_nodes += train(d.x, d.x_tilde, d.t, cfg).report.final_l;
    cfg.variant = Variant::irvfl;
    cfg.l_max = 1000;
    irvfl_nodes += train(d.x, Matrix(), d.t, cfg).report.final_l;
  }
  scn_nodes /= seeds;
  scn_plus_nodes /= seeds;
  irvfl_nodes /= seeds;

  std::ostringstream d;
  d << "synthetic mean nodes: scn+ " << scn_plus_nodes << ", scn " << scn_nodes
    << ", irvfl " << irvfl_nodes;
  bool ok = scn_plus_nodes <= scn_nodes && scn_nodes < 0.5 * irvfl_nodes;

  // Real half: laser.csv at the Table 5 epsilon, else diabetes.csv.
  std::optional<fs::path> real = find_dataset("laser.csv");
  double epsilon = 0.225;
  int n_train = 700;
  LupiParams lupi{0.1, 1e5};
  if (!real) {
    // diabetes is noisy: its normal-view rmse plateaus near 0.17, so the
    // shared tolerance sits just above that floor. (C, gamma) follow the
    // per-dataset grid search, like every benchmark in the protocol.
    real = find_dataset("diabetes.csv");
    epsilon = 0.19;
    n_train = 300;
    lupi = {0.01, 1e3};
  }
  if (real) {
    const DataTable table = load_csv(real->string());
    ExperimentConfig ec;
    ec.task_kind = TaskKind::regression;
    ec.metric = Metric::rmse;
    ec.fixed_mode = FixedMode::fixed_epsilon;
    ec.n_train = n_train;
    ec.trials = 20;
    ec.base_seed = 1;
    ec.train_config.epsilon = epsilon;
    ec.train_config.l_max = 100;
    ec.train_config.lupi = lupi;
    ec.irvfl_l_max = 500;
    ec.jobs = 4;
    const ExperimentResult r = run_trials(table, ec,
                                          {Variant::scn, Variant::scn_plus, Variant::irvfl});
    const double s = r.stats.at(Variant::scn).ave_nodes;
    const double sp = r.stats.at(Variant::scn_plus).ave_nodes;
    const double iv = r.stats.at(Variant::irvfl).ave_nodes;
    d << "; " << real->filename().string() << " (eps=" << epsilon
      << ") mean nodes: scn+ " << sp << ", scn " << s << ", irvfl " << iv;
    ok = ok && sp <= s && s < 0.5 * iv;
  } else {
    d << "; real regression set not supplied (laser.csv / diabetes.csv) - synthetic half only";
  }
  return {ok ? Status::pass : Status::fail, d.str()};
}

// ----- criterion 4: Laser desk-scale reproduction ---------------------------

Outcome criterion_laser() {
  const auto path = find_dataset("laser.csv");
  if (!path)
    return {Status::skip, "laser.csv not found in SCNPLUS_DATA_DIR - supply the KEEL laser set"};

  const DataTable table = load_csv(path->string());
  ExperimentConfig ec;
  ec.task_kind = TaskKind::regression;
  ec.metric = Metric::rmse;
  ec.fixed_mode = FixedMode::fixed_epsilon;
  ec.n_train = 700;
  ec.trials = 50;
  ec.base_seed = 1;
  ec.train_config.epsilon = 0.225;
  ec.train_config.l_max = 100;
  ec.irvfl_l_max = 100;
  ec.jobs = 4;
  const ExperimentResult r = run_trials(table, ec, {Variant::scn, Variant::scn_plus});

  const TrialStats& scn = r.stats.at(Variant::scn);
  const TrialStats& plus = r.stats.at(Variant::scn_plus);
  std::ostringstream d;
  d << "scn+ nodes " << plus.ave_nodes << " (reference 19.48, window [14,26]), scn nodes "
    << scn.ave_nodes << " (reference 20.26, window [15,27]), test rmse scn+ " << plus.test_ave
    << " / scn " << scn.test_ave << " (reference 0.2335/0.2336, window [0.20,0.27])";
  const bool ok = plus.ave_nodes >= 14.0 && plus.ave_nodes <= 26.0 &&
                  scn.ave_nodes >= 15.0 && scn.ave_nodes <= 27.0 &&
                  plus.test_ave >= 0.20 && plus.test_ave <= 0.27 &&
                  scn.test_ave >= 0.20 && scn.test_ave <= 0.27;
  return {ok ? Status::pass : Status::fail, d.str()};
}

// ----- criterion 5: Wine desk-scale reproduction ----------------------------

Outcome criterion_wine() {
  const auto path = find_dataset("wine.csv");
  if (!path)
    return {Status::skip,
            "wine.csv not found in SCNPLUS_DATA_DIR - run tools/export_datasets.py"};

  const DataTable table = load_csv(path->string());
  ExperimentConfig ec;
  ec.task_kind = TaskKind::classification;
  ec.metric = Metric::accuracy;
  ec.fixed_mode = FixedMode::fixed_lmax;
  ec.n_train = 100;
  ec.trials = 50;
  ec.base_seed = 1;
  ec.train_config.l_max = 50;
  ec.train_config.lupi = {0.1, 1e5};  // the pair the Wine grid search settles on
  ec.jobs = 4;
  const ExperimentResult r = run_trials(table, ec);

  const double scn = r.stats.at(Variant::scn).test_ave;
  const double plus = r.stats.at(Variant::scn_plus).test_ave;
  const double irvfl = r.stats.at(Variant::irvfl).test_ave;
  const double irvfl_plus = r.stats.at(Variant::irvfl_plus).test_ave;
  std::ostringstream d;
  d << "test accuracy: scn+ " << plus << " (reference 82.74, floor 78), scn " << scn
    << " (reference 82.54), irvfl " << irvfl << ", irvfl+ " << irvfl_plus;
  const bool ok = plus >= 78.0 && plus >= scn - 1.0 &&
                  std::min(scn, plus) > std::max(irvfl, irvfl_plus);
  return {ok ? Status::pass : Status::fail, d.str()};
}

// ----- criterion 6: determinism ---------------------------------------------

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Outcome criterion_determinism() {
  // (a) cmd_train twice with identical flags and --seed: hash-equal models.
  const fs::path dir = fs::temp_directory_path() /
                       ("scnplus_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path csv = dir / "data.csv";
  write_csv(csv.string(), make_sin3x_table(150, 3));

  bool cli_identical = false;
  {
    const std::string base = std::string("\"") + SCNPLUS_CLI_PATH + "\" train --dataset " +
                             csv.string() + " --variant scn+ --seed 7 --lmax 12 --epsilon 0";
    const std::string log = " > /dev/null 2>&1";
    const int s1 = std::system((base + " --out " + (dir / "a").string() + log).c_str());
    const int s2 = std::system((base + " --out " + (dir / "b").string() + log).c_str());
    if (WIFEXITED(s1) && WEXITSTATUS(s1) == 0 && WIFEXITED(s2) && WEXITSTATUS(s2) == 0) {
      const std::string a = file_bytes(dir / "a" / "model.json");
      const std::string b = file_bytes(dir / "b" / "model.json");
      cli_identical = !a.empty() && a == b &&
                      fnv1a64(a.data(), a.size()) == fnv1a64(b.data(), b.size());
    }
  }

  // (b) run_trials reproduces per-trial records exactly.
  const DataTable table = make_sin3x_table(160, 5);
  ExperimentConfig ec;
  ec.task_kind = TaskKind::regression;
  ec.metric = Metric::rmse;
  ec.fixed_mode = FixedMode::fixed_epsilon;
  ec.n_train = 100;
  ec.trials = 5;
  ec.base_seed = 11;
  ec.train_config.epsilon = 0.08;
  ec.train_config.l_max = 80;
  ec.irvfl_l_max = 300;
  const ExperimentResult r1 = run_trials(table, ec);
  const ExperimentResult r2 = run_trials(table, ec);
  bool trials_identical = true;
  for (const auto& [v, s] : r1.stats) {
    const auto& t = r2.stats.at(v);
    if (s.per_trial.size() != t.per_trial.size()) trials_identical = false;
    for (std::size_t i = 0; i < s.per_trial.size() && trials_identical; ++i) {
      trials_identical = s.per_trial[i].seed == t.per_trial[i].seed &&
                         s.per_trial[i].train_metric == t.per_trial[i].train_metric &&
                         s.per_trial[i].test_metric == t.per_trial[i].test_metric &&
                         s.per_trial[i].final_l == t.per_trial[i].final_l;
    }
  }

  std::error_code ec_rm;
  fs::remove_all(dir, ec_rm);

  std::ostringstream d;
  d << "cmd_train model files " << (cli_identical ? "hash-identical" : "DIFFER")
    << "; run_trials per-trial records " << (trials_identical ? "reproduced exactly" : "DIFFER");
  return {cli_identical && trials_identical ? Status::pass : Status::fail, d.str()};
}

// ----- criterion 7: privileged isolation ------------------------------------

Outcome criterion_privileged_isolation() {
  int compared = 0;
  bool identical = true;
  for (Variant variant : {Variant::scn_plus, Variant::irvfl_plus}) {
    const DataTable table = make_blobs_table(150, 3, 17);
    const auto [train_idx, test_idx] = split_train_test(table, 100, 17);
    const FeatureSplit split = split_privileged(table, 17);
    const NormalizationParams norm = fit_normalizer(table, train_idx);
    const EncodedTargets enc = encode_targets(table, TaskKind::classification, train_idx);

    const Matrix train_norm = apply_normalizer(norm, select_rows(table.features, train_idx));
    TrainConfig cfg;
    cfg.variant = variant;
    cfg.l_max = 15;
    cfg.epsilon = 0.0;
    cfg.seed = 17;
    TrainResult r = train(select_cols(train_norm, split.normal_indices),
                          select_cols(train_norm, split.privileged_indices),
                          select_rows(enc.T, train_idx), cfg);
    r.model.preproc = ModelPreproc{norm, split};
    r.model.task_kind = TaskKind::classification;
    r.model.class_labels = enc.class_labels;

    Matrix z = select_rows(table.features, test_idx);
    const Matrix baseline = predict(r.model, z);

    for (double garbage : {0.0, 1e9, std::numeric_limits<double>::quiet_NaN()}) {
      Matrix perturbed = z;
      for (int col : split.privileged_indices) perturbed.col(col).setConstant(garbage);
      const Matrix f = predict(r.model, perturbed);
      ++compared;
      if (!(f == baseline)) identical = false;  // bit-exact comparison
    }
  }
  std::ostringstream d;
  d << compared << " perturbations (zero, 1e9, NaN) across scn+/irvfl+ models, predictions "
    << (identical ? "bit-identical" : "CHANGED");
  return {identical && compared == 6 ? Status::pass : Status::fail, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("SCNPLUS_DATA_DIR")) data_dir_ = env;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--data-dir") data_dir_ = argv[i + 1];
  }

  struct Entry {
    int number;
    const char* name;
    Outcome (*fn)();
  };
  const std::vector<Entry> entries = {
      {1, "solver-oracle equivalence", criterion_solver_equivalence},
      {2, "residual contraction (sin(3x))", criterion_contraction},
      {3, "structural economy at equal epsilon", criterion_structural_economy},
      {4, "Laser desk-scale reproduction", criterion_laser},
      {5, "Wine desk-scale reproduction", criterion_wine},
      {6, "determinism of cmd_train and run_trials", criterion_determinism},
      {7, "privileged isolation at prediction time", criterion_privileged_isolation},
  };

  int failures = 0;
  int skips = 0;
  bool synthetic_all_ran = true;
  for (const auto& entry : entries) {
    Outcome outcome;
    try {
      outcome = entry.fn();
    } catch (const std::exception& e) {
      outcome = {Status::fail, std::string("exception: ") + e.what()};
    }
    const char* tag = outcome.status == Status::pass   ? "[PASS]"
                      : outcome.status == Status::skip ? "[SKIP]"
                                                       : "[FAIL]";
    std::cout << tag << " criterion " << entry.number << ": " << entry.name << " - "
              << outcome.detail << "\n";
    if (outcome.status == Status::fail) ++failures;
    if (outcome.status == Status::skip) {
      ++skips;
      if (entry.number != 4 && entry.number != 5) synthetic_all_ran = false;
    }
  }

  // Criterion 8: the suite itself must run without network or real datasets;
  // only the real-data criteria (4, 5) may be gated behind the data flag.
  const bool c8 = synthetic_all_ran;
  std::cout << (c8 ? "[PASS]" : "[FAIL]")
            << " criterion 8: synthetic-only property suite - criteria 1-3, 6, 7 ran on "
               "generated data"
            << (skips ? " (real-data criteria gated behind SCNPLUS_DATA_DIR)" : "") << "\n";
  if (!c8) ++failures;

  std::cout << (failures == 0 ? "ACCEPTANCE OK" : "ACCEPTANCE FAILED") << " ("
            << failures << " failures, " << skips << " skips)\n";
  return failures == 0 ? 0 : 1;
}
