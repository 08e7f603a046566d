// Command-line front end: train / predict / bench / sweep / gen.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 training aborted.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scnplus/config.hpp"
#include "scnplus/dataset.hpp"
#include "scnplus/experiment.hpp"
#include "scnplus/model_io.hpp"
#include "scnplus/synthetic.hpp"
#include "scnplus/trainers.hpp"
#include "scnplus/version.hpp"

namespace fs = std::filesystem;
using namespace scnplus;

namespace {

constexpr std::uint64_t kBuiltinSeed = 1;

struct CommonArgs {
  std::string config_path;
  std::string dataset_path;
  std::string out_dir = ".";
  std::string variant = "scn+";
  std::string task = "auto";
  std::string target_name;
  std::string activation;
  std::optional<std::uint64_t> seed;
  std::optional<int> l_max;
  std::optional<double> epsilon;
  std::optional<double> c;
  std::optional<double> gamma;
  std::optional<int> trials;
  std::optional<int> jobs;
  std::optional<int> n_train;
};

void add_common_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Config file (key = value sections, or JSON)");
  cmd->add_option("--dataset", args.dataset_path, "Dataset CSV path");
  cmd->add_option("--variant", args.variant, "Algorithm: scn, scn+, irvfl, irvfl+");
  cmd->add_option("--seed", args.seed, "Base random seed");
  cmd->add_option("--lmax", args.l_max, "Maximum hidden nodes");
  cmd->add_option("--epsilon", args.epsilon, "Training tolerance");
  cmd->add_option("--c", args.c, "LUPI slack coefficient C");
  cmd->add_option("--gamma", args.gamma, "LUPI regularization coefficient gamma");
  cmd->add_option("--trials", args.trials, "Number of seeded trials");
  cmd->add_option("--jobs", args.jobs, "Parallel trial workers");
  cmd->add_option("--out", args.out_dir, "Output directory");
  cmd->add_option("--task", args.task, "Task kind: classification, regression, auto");
  cmd->add_option("--target", args.target_name, "Target column name (default: trailing column)");
  cmd->add_option("--activation", args.activation, "Activation: sigmoid, tanh");
}

ConfigMap effective_config(const CommonArgs& args) {
  ConfigMap config;
  if (!args.config_path.empty()) config = load_config(args.config_path);
  // CLI flags override the file.
  if (!args.dataset_path.empty()) config.set("data.path", args.dataset_path);
  if (!args.target_name.empty()) config.set("data.target", args.target_name);
  if (args.task != "auto") config.set("data.task", args.task);
  if (args.seed) config.set("train.seed", std::to_string(*args.seed));
  if (args.l_max) config.set("train.lmax", std::to_string(*args.l_max));
  if (args.epsilon) config.set("train.epsilon", std::to_string(*args.epsilon));
  if (!args.activation.empty()) config.set("train.activation", args.activation);
  if (args.c) config.set("lupi.c", std::to_string(*args.c));
  if (args.gamma) config.set("lupi.gamma", std::to_string(*args.gamma));
  if (args.trials) config.set("experiment.trials", std::to_string(*args.trials));
  if (args.jobs) config.set("experiment.jobs", std::to_string(*args.jobs));
  if (args.n_train) config.set("data.ntrain", std::to_string(*args.n_train));
  config.set("cli.variant", args.variant);
  return config;
}

std::uint64_t resolve_seed(const CommonArgs& args, const ConfigMap& config) {
  if (args.seed) return *args.seed;
  if (const char* env = std::getenv("SCNPLUS_DEFAULT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw std::invalid_argument("SCNPLUS_DEFAULT_SEED is not an unsigned integer");
    }
  }
  return config.get_u64("train.seed", kBuiltinSeed);
}

TaskKind detect_task(const DataTable& table, const std::string& requested) {
  if (requested == "classification") return TaskKind::classification;
  if (requested == "regression") return TaskKind::regression;
  if (requested != "auto" && !requested.empty())
    throw std::invalid_argument("unknown task kind: " + requested);
  // Auto: any non-numeric target means labels; otherwise a small set of
  // integral values is treated as class labels, anything else as regression.
  std::vector<std::string> distinct;
  bool all_numeric = true;
  bool all_integral = true;
  for (const auto& raw : table.targets_raw) {
    double v = 0.0;
    if (!detail::parse_double(raw, v)) {
      all_numeric = false;
      break;
    }
    if (v != std::floor(v)) all_integral = false;
    if (std::find(distinct.begin(), distinct.end(), raw) == distinct.end())
      distinct.push_back(raw);
  }
  if (!all_numeric) return TaskKind::classification;
  if (all_integral && distinct.size() >= 2 && distinct.size() <= 10)
    return TaskKind::classification;
  return TaskKind::regression;
}

TrainConfig train_config_from(const ConfigMap& config, std::uint64_t seed) {
  TrainConfig tc;
  tc.variant = variant_from_string(config.get_string("cli.variant", "scn+"));
  tc.l_max = static_cast<int>(config.get_int("train.lmax", 100));
  tc.epsilon = config.get_double("train.epsilon", 0.0);
  tc.r_init = config.get_double("train.r_init", 0.9);
  tc.renewal_cap = static_cast<int>(config.get_int("train.renewal_cap", 10));
  tc.activation = activation_from_string(config.get_string("train.activation", "sigmoid"));
  const std::string norm = config.get_string("train.tolerance_norm", "rmse");
  if (norm == "rmse") {
    tc.tolerance_norm = ToleranceNorm::rmse;
  } else if (norm == "frobenius") {
    tc.tolerance_norm = ToleranceNorm::frobenius;
  } else {
    throw std::invalid_argument("train.tolerance_norm must be rmse or frobenius");
  }
  tc.lupi.C = config.get_double("lupi.c", 0.1);
  tc.lupi.gamma = config.get_double("lupi.gamma", 1e5);
  tc.schedule.lambdas = config.get_double_list("schedule.lambdas",
                                               ScaleSchedule::scn_default().lambdas);
  tc.schedule.t_max = static_cast<int>(config.get_int("schedule.tmax", 10));
  tc.seed = seed;
  return tc;
}

DataTable load_table(const ConfigMap& config) {
  const std::string path = config.get_string("data.path");
  if (path.empty()) throw std::invalid_argument("no dataset given (use --dataset or data.path)");
  const std::string target = config.get_string("data.target");
  return load_csv(path, target.empty() ? TargetSpec::trailing() : TargetSpec::by_name(target));
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write output file: " + path.string());
  out << content;
}

int cmd_train(const CommonArgs& args) {
  const ConfigMap config = effective_config(args);
  const std::uint64_t seed = resolve_seed(args, config);
  const DataTable table = load_table(config);
  const TaskKind task = detect_task(table, config.get_string("data.task", "auto"));
  TrainConfig tc = train_config_from(config, seed);

  // The whole file is the training set: split attributes, fit the
  // normalizer on all rows, encode, train.
  const FeatureSplit split = split_privileged(table, seed);
  std::vector<int> all_rows(static_cast<std::size_t>(table.n_samples()));
  for (int i = 0; i < table.n_samples(); ++i) all_rows[static_cast<std::size_t>(i)] = i;
  const NormalizationParams norm = fit_normalizer(table, all_rows);
  const EncodedTargets enc = encode_targets(table, task, all_rows);

  const Matrix normalized = apply_normalizer(norm, table.features);
  const Matrix x = select_cols(normalized, split.normal_indices);
  const Matrix xt = select_cols(normalized, split.privileged_indices);

  TrainResult result = train(x, xt, enc.T, tc);
  Model& model = result.model;
  model.preproc = ModelPreproc{norm, split};
  model.task_kind = task;
  model.class_labels = enc.class_labels;
  model.target_min = enc.target_min;
  model.target_max = enc.target_max;

  fs::create_directories(args.out_dir);
  const fs::path out(args.out_dir);
  save_model((out / "model.json").string(), model);
  write_split_record((out / "split.json").string(), split);

  RunManifest manifest;
  manifest.config_snapshot = config.to_json();
  manifest.config_snapshot["resolved_seed"] = seed;
  manifest.dataset_path = config.get_string("data.path");
  manifest.dataset_fingerprint = fnv1a64_file(manifest.dataset_path);
  manifest.split = split;
  manifest.base_seed = seed;
  write_manifest((out / "manifest.json").string(), manifest);

  std::ostringstream history;
  history << "node,rmse\n" << std::setprecision(17);
  for (std::size_t i = 0; i < result.report.rmse_history.size(); ++i)
    history << (i + 1) << "," << result.report.rmse_history[i] << "\n";
  write_text_file(out / "rmse_history.csv", history.str());

  std::cout << "trained " << to_string(tc.variant) << ": L=" << result.report.final_l
            << " nodes, final RMSE="
            << (result.report.rmse_history.empty() ? 0.0 : result.report.rmse_history.back())
            << ", stop=" << to_string(result.report.stop_reason)
            << ", candidates=" << result.report.candidates_evaluated << "\n"
            << "model written to " << (out / "model.json").string() << "\n";
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path, bool no_target,
                const std::string& target_name) {
  const Model model = load_model(model_path);

  Matrix features;
  std::vector<std::string> targets;
  if (no_target) {
    features = load_features_csv(data_path);
  } else {
    const DataTable table = load_csv(
        data_path, target_name.empty() ? TargetSpec::trailing() : TargetSpec::by_name(target_name));
    features = table.features;
    targets = table.targets_raw;
  }

  const Matrix f = predict(model, features);
  std::vector<std::string> labels;
  if (model.task_kind == TaskKind::classification) labels = predict_labels(model, features);

  std::ostringstream out;
  out << std::setprecision(17);
  for (Eigen::Index q = 0; q < f.cols(); ++q) out << (q ? "," : "") << "f" << q;
  if (!labels.empty()) out << ",label";
  out << "\n";
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    for (Eigen::Index q = 0; q < f.cols(); ++q) out << (q ? "," : "") << f(i, q);
    if (!labels.empty()) out << "," << labels[static_cast<std::size_t>(i)];
    out << "\n";
  }
  write_text_file(out_path, out.str());
  std::cout << "predictions written to " << out_path << "\n";

  if (!targets.empty()) {
    if (model.task_kind == TaskKind::classification) {
      std::cout << "accuracy: " << accuracy_pct(labels, targets) << " %\n";
    } else {
      Matrix t(f.rows(), 1);
      const double span = model.target_max - model.target_min;
      for (Eigen::Index i = 0; i < f.rows(); ++i) {
        double v = 0.0;
        if (!detail::parse_double(targets[static_cast<std::size_t>(i)], v))
          throw DataError("non-numeric regression target at row " + std::to_string(i + 1));
        t(i, 0) = span == 0.0 ? 0.0 : std::clamp((v - model.target_min) / span, 0.0, 1.0);
      }
      std::cout << "rmse: " << rmse_of(f, t) << "\n";
    }
  }
  return 0;
}

ExperimentConfig experiment_config_from(const ConfigMap& config, const DataTable& table,
                                        std::uint64_t seed) {
  ExperimentConfig ec;
  ec.task_kind = detect_task(table, config.get_string("data.task", "auto"));
  ec.metric = ExperimentConfig::metric_for(ec.task_kind);
  ec.fixed_mode = ec.task_kind == TaskKind::classification ? FixedMode::fixed_lmax
                                                           : FixedMode::fixed_epsilon;
  ec.n_train = static_cast<int>(config.get_int("data.ntrain", 0));
  if (ec.n_train <= 0)
    throw std::invalid_argument("bench/sweep need the training-set size (--ntrain or data.ntrain)");
  ec.trials = static_cast<int>(config.get_int("experiment.trials", 50));
  ec.jobs = static_cast<int>(config.get_int("experiment.jobs", 1));
  ec.irvfl_l_max = static_cast<int>(config.get_int("experiment.irvfl_lmax", 0));
  ec.base_seed = seed;
  ec.train_config = train_config_from(config, seed);
  return ec;
}

int cmd_bench(const CommonArgs& args, int irvfl_lmax_flag) {
  const ConfigMap config = effective_config(args);
  const std::uint64_t seed = resolve_seed(args, config);
  const DataTable table = load_table(config);
  ExperimentConfig ec = experiment_config_from(config, table, seed);
  if (irvfl_lmax_flag > 0) ec.irvfl_l_max = irvfl_lmax_flag;

  const ExperimentResult result = run_trials(table, ec);

  fs::create_directories(args.out_dir);
  const fs::path out(args.out_dir);
  write_text_file(out / "per_trial.csv", per_trial_csv(result));
  write_text_file(out / "table.csv", table_csv(result));
  const std::string table_text = format_table(result);
  write_text_file(out / "table.txt", table_text);

  std::cout << "dataset: " << config.get_string("data.path") << "  task: "
            << to_string(ec.task_kind) << "  trials: " << ec.trials << "  mode: "
            << to_string(ec.fixed_mode) << "\n"
            << table_text;
  for (std::uint64_t s : result.aborted_seeds)
    std::cerr << "warning: trial with seed " << s << " aborted and was excluded\n";
  std::cout << "outputs in " << out.string() << "\n";
  return 0;
}

int cmd_sweep(const CommonArgs& args, const std::string& c_grid,
              const std::string& gamma_grid, int random_draws) {
  ConfigMap config = effective_config(args);
  if (!config.has("experiment.trials")) config.set("experiment.trials", "10");
  if (!c_grid.empty()) config.set("sweep.c_grid", c_grid);
  if (!gamma_grid.empty()) config.set("sweep.gamma_grid", gamma_grid);
  const std::uint64_t seed = resolve_seed(args, config);
  const DataTable table = load_table(config);
  const ExperimentConfig ec = experiment_config_from(config, table, seed);

  SweepGrid grid;
  grid.c_values = config.get_double_list("sweep.c_grid", grid.c_values);
  grid.gamma_values = config.get_double_list("sweep.gamma_grid", grid.gamma_values);
  if (random_draws > 0 || config.get_string("sweep.mode") == "random") {
    grid.random = true;
    grid.draws = random_draws > 0
                     ? random_draws
                     : static_cast<int>(config.get_int("sweep.draws", 30));
  }

  const SweepResult result = hyper_search(table, ec, grid);

  fs::create_directories(args.out_dir);
  const fs::path out(args.out_dir);
  write_text_file(out / "sweep.csv", sweep_csv(result));

  const SweepPoint& best = result.ranked.front();
  std::cout << "evaluated " << result.points.size() << " (C, gamma) pairs over "
            << ec.trials << " trials each\n"
            << "recommended: C=" << best.c << " gamma=" << best.gamma
            << " (test " << to_string(result.metric) << " " << best.test_metric
            << ", train " << best.train_metric << ")\n"
            << "surface written to " << (out / "sweep.csv").string() << "\n";
  return 0;
}

int cmd_gen(const std::string& kind, int n, int classes, std::uint64_t seed,
            const std::string& out_path) {
  DataTable table;
  if (kind == "sin3x") {
    table = make_sin3x_table(n, seed);
  } else if (kind == "blobs") {
    table = make_blobs_table(n, classes, seed);
  } else {
    throw std::invalid_argument("unknown synthetic kind: " + kind);
  }
  write_csv(out_path, table);
  std::cout << "wrote " << table.n_samples() << " rows to " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SCN+ incremental learning with privileged information"};
  app.set_version_flag("--version", std::string("scnplus ") + kVersion);
  app.require_subcommand(1);

  CommonArgs train_args, bench_args, sweep_args;

  CLI::App* train_cmd = app.add_subcommand("train", "Train one model on a CSV dataset");
  add_common_flags(train_cmd, train_args);

  std::string model_path, predict_data, predict_out = "predictions.csv", predict_target;
  bool no_target = false;
  CLI::App* predict_cmd = app.add_subcommand("predict", "Predict with a trained model");
  predict_cmd->add_option("--model", model_path, "Model JSON path")->required();
  predict_cmd->add_option("--dataset", predict_data, "Input CSV path")->required();
  predict_cmd->add_option("--out", predict_out, "Predictions CSV path");
  predict_cmd->add_option("--target", predict_target, "Target column name");
  predict_cmd->add_flag("--no-target", no_target, "Input file has no target column");

  int irvfl_lmax_flag = 0;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Run the multi-trial benchmark (all four variants)");
  add_common_flags(bench_cmd, bench_args);
  bench_cmd->add_option("--ntrain", bench_args.n_train, "Training rows per trial");
  bench_cmd->add_option("--irvfl-lmax", irvfl_lmax_flag, "Node cap for the IRVFL variants");

  std::string c_grid, gamma_grid;
  int random_draws = 0;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "C/gamma hyperparameter sweep for SCN+");
  add_common_flags(sweep_cmd, sweep_args);
  sweep_cmd->add_option("--ntrain", sweep_args.n_train, "Training rows per trial");
  sweep_cmd->add_option("--c-grid", c_grid, "Comma list of C values");
  sweep_cmd->add_option("--gamma-grid", gamma_grid, "Comma list of gamma values");
  sweep_cmd->add_option("--random-draws", random_draws, "Random search instead of grid");

  std::string gen_kind = "sin3x", gen_out = "synthetic.csv";
  int gen_n = 200, gen_classes = 3;
  std::uint64_t gen_seed = kBuiltinSeed;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset CSV");
  gen_cmd->add_option("--kind", gen_kind, "sin3x or blobs");
  gen_cmd->add_option("--n", gen_n, "Sample count");
  gen_cmd->add_option("--classes", gen_classes, "Class count (blobs)");
  gen_cmd->add_option("--seed", gen_seed, "Seed");
  gen_cmd->add_option("--out", gen_out, "Output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(train_args);
    if (predict_cmd->parsed())
      return cmd_predict(model_path, predict_data, predict_out, no_target, predict_target);
    if (bench_cmd->parsed()) return cmd_bench(bench_args, irvfl_lmax_flag);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_args, c_grid, gamma_grid, random_draws);
    if (gen_cmd->parsed()) return cmd_gen(gen_kind, gen_n, gen_classes, gen_seed, gen_out);
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const TrainingError& e) {
    std::cerr << "training aborted: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
