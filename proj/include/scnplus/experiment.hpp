#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "scnplus/dataset.hpp"
#include "scnplus/trainers.hpp"
#include "scnplus/types.hpp"

namespace scnplus {

enum class FixedMode { fixed_lmax, fixed_epsilon };
enum class Metric { accuracy, rmse };

inline const char* to_string(FixedMode m) {
  return m == FixedMode::fixed_lmax ? "fixed_lmax" : "fixed_epsilon";
}
inline const char* to_string(Metric m) {
  return m == Metric::accuracy ? "accuracy" : "rmse";
}

/// Multi-trial benchmark protocol: `trials` seeded repetitions, each with a
/// fresh train/test shuffle and privileged split shared by all variants.
struct ExperimentConfig {
  TaskKind task_kind = TaskKind::regression;
  int n_train = 0;
  int trials = 50;
  TrainConfig train_config;
  Metric metric = Metric::rmse;
  FixedMode fixed_mode = FixedMode::fixed_epsilon;
  std::uint64_t base_seed = 1;
  int irvfl_l_max = 0;  // 0: same l_max as the SC variants
  int jobs = 1;

  static Metric metric_for(TaskKind k) {
    return k == TaskKind::classification ? Metric::accuracy : Metric::rmse;
  }
};

struct TrialRecord {
  std::uint64_t seed = 0;
  double train_metric = 0.0;
  double test_metric = 0.0;
  int final_l = 0;
  double wall_time_seconds = 0.0;
};

/// AVE / DEV statistics over the surviving trials. `dev` is the sample
/// standard deviation (divisor trials - 1; zero for a single trial).
struct TrialStats {
  double train_ave = 0.0;
  double train_dev = 0.0;
  double test_ave = 0.0;
  double test_dev = 0.0;
  double ave_nodes = 0.0;
  std::vector<TrialRecord> per_trial;
};

struct ExperimentResult {
  std::map<Variant, TrialStats> stats;
  std::vector<std::uint64_t> aborted_seeds;
  Metric metric = Metric::rmse;
  FixedMode mode = FixedMode::fixed_epsilon;
  int trials_requested = 0;
};

inline double rmse_of(const Matrix& pred, const Matrix& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols())
    throw DataError("rmse_of: shape mismatch");
  const double n = static_cast<double>(pred.rows()) * static_cast<double>(pred.cols());
  return std::sqrt((pred - target).squaredNorm() / n);
}

inline double accuracy_pct(const std::vector<std::string>& pred,
                           const std::vector<std::string>& truth) {
  if (pred.size() != truth.size()) throw DataError("accuracy_pct: length mismatch");
  if (pred.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (pred[i] == truth[i]) ++hits;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(pred.size());
}

namespace detail {

inline std::pair<double, double> mean_sample_dev(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

struct TrialOutcome {
  bool aborted = false;
  std::uint64_t seed = 0;
  std::map<Variant, TrialRecord> records;
  FeatureSplit split;           // shared by every variant in the trial
  std::vector<int> train_rows;  // likewise
  std::vector<int> test_rows;
};

}  // namespace detail

/// Runs one seeded trial: shuffle/split/normalize once, then train and score
/// every requested variant on identical views.
inline detail::TrialOutcome run_single_trial(const DataTable& table,
                                             const ExperimentConfig& config,
                                             const std::vector<Variant>& variants,
                                             std::uint64_t seed) {
  detail::TrialOutcome outcome;
  outcome.seed = seed;

  const auto [train_idx, test_idx] = split_train_test(table, config.n_train, seed);
  const FeatureSplit split = split_privileged(table, seed);
  outcome.split = split;
  outcome.train_rows = train_idx;
  outcome.test_rows = test_idx;
  const NormalizationParams norm = fit_normalizer(table, train_idx);
  const EncodedTargets enc = encode_targets(table, config.task_kind, train_idx);

  const Matrix train_raw = select_rows(table.features, train_idx);
  const Matrix test_raw = select_rows(table.features, test_idx);
  const Matrix train_norm = apply_normalizer(norm, train_raw);
  const Matrix x_train = select_cols(train_norm, split.normal_indices);
  const Matrix xt_train = select_cols(train_norm, split.privileged_indices);
  const Matrix t_train = select_rows(enc.T, train_idx);
  const Matrix t_test = select_rows(enc.T, test_idx);

  std::vector<std::string> train_labels, test_labels;
  if (config.task_kind == TaskKind::classification) {
    for (int r : train_idx) train_labels.push_back(table.targets_raw[static_cast<std::size_t>(r)]);
    for (int r : test_idx) test_labels.push_back(table.targets_raw[static_cast<std::size_t>(r)]);
  }

  for (Variant v : variants) {
    TrainConfig tc = config.train_config;
    tc.variant = v;
    tc.seed = seed;
    if (config.fixed_mode == FixedMode::fixed_lmax) tc.epsilon = 0.0;
    if (!uses_supervision(v) && config.irvfl_l_max > 0) tc.l_max = config.irvfl_l_max;

    TrainResult result;
    try {
      result = train(x_train, xt_train, t_train, tc);
    } catch (const TrainingError&) {
      outcome.aborted = true;
      return outcome;
    }

    Model& model = result.model;
    model.preproc = ModelPreproc{norm, split};
    model.task_kind = config.task_kind;
    model.class_labels = enc.class_labels;
    model.target_min = enc.target_min;
    model.target_max = enc.target_max;

    TrialRecord record;
    record.seed = seed;
    record.final_l = result.report.final_l;
    record.wall_time_seconds = result.report.wall_time_seconds;
    if (config.task_kind == TaskKind::classification) {
      record.train_metric = accuracy_pct(predict_labels(model, train_raw), train_labels);
      record.test_metric = accuracy_pct(predict_labels(model, test_raw), test_labels);
    } else {
      record.train_metric = rmse_of(predict(model, train_raw), t_train);
      record.test_metric = rmse_of(predict(model, test_raw), t_test);
    }
    outcome.records[v] = record;
  }
  return outcome;
}

/// Fifty-trials protocol (or any count): trial k uses seed base_seed + k for
/// the shuffle, the privileged split, and training. Aborted trials are
/// excluded; if fewer than 90% survive the experiment fails.
inline ExperimentResult run_trials(
    const DataTable& table, const ExperimentConfig& config,
    const std::vector<Variant>& variants = {Variant::scn, Variant::scn_plus,
                                            Variant::irvfl, Variant::irvfl_plus}) {
  if (config.trials < 1) throw std::invalid_argument("run_trials: trials must be >= 1");
  if (config.fixed_mode == FixedMode::fixed_epsilon && config.train_config.epsilon <= 0.0)
    throw std::invalid_argument("run_trials: fixed_epsilon mode needs epsilon > 0");

  std::vector<detail::TrialOutcome> outcomes(static_cast<std::size_t>(config.trials));
  const int jobs = std::max(1, config.jobs);
  if (jobs == 1) {
    for (int k = 0; k < config.trials; ++k)
      outcomes[static_cast<std::size_t>(k)] =
          run_single_trial(table, config, variants, config.base_seed + static_cast<std::uint64_t>(k));
  } else {
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&, w]() {
        for (int k = w; k < config.trials; k += jobs)
          outcomes[static_cast<std::size_t>(k)] = run_single_trial(
              table, config, variants, config.base_seed + static_cast<std::uint64_t>(k));
      });
    }
    for (auto& t : workers) t.join();
  }

  ExperimentResult result;
  result.metric = config.metric;
  result.mode = config.fixed_mode;
  result.trials_requested = config.trials;

  int survivors = 0;
  for (const auto& o : outcomes) {
    if (o.aborted) {
      result.aborted_seeds.push_back(o.seed);
      continue;
    }
    ++survivors;
    for (const auto& [v, record] : o.records) result.stats[v].per_trial.push_back(record);
  }
  if (survivors * 10 < config.trials * 9) {
    throw TrainingError("run_trials: only " + std::to_string(survivors) + "/" +
                        std::to_string(config.trials) + " trials survived (< 90%)");
  }

  for (auto& [v, stats] : result.stats) {
    std::vector<double> train_m, test_m, nodes;
    for (const auto& r : stats.per_trial) {
      train_m.push_back(r.train_metric);
      test_m.push_back(r.test_metric);
      nodes.push_back(static_cast<double>(r.final_l));
    }
    std::tie(stats.train_ave, stats.train_dev) = detail::mean_sample_dev(train_m);
    std::tie(stats.test_ave, stats.test_dev) = detail::mean_sample_dev(test_m);
    stats.ave_nodes = detail::mean_sample_dev(nodes).first;
  }
  return result;
}

// --- hyperparameter sweep -------------------------------------------------

/// The C / gamma search space: an explicit grid, or log-uniform random draws
/// within the standard bounds.
struct SweepGrid {
  std::vector<double> c_values = {1e-2, 1e-1, 1.0, 2.0, 5.0, 10.0};
  std::vector<double> gamma_values = {1e2, 1e3, 1e4, 1e5, 1e6};
  bool random = false;
  double c_lo = 1e-2, c_hi = 1e1;
  double gamma_lo = 1e2, gamma_hi = 1e6;
  int draws = 30;
};

struct SweepPoint {
  double c = 0.0;
  double gamma = 0.0;
  double train_metric = 0.0;
  double test_metric = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // evaluation order
  std::vector<SweepPoint> ranked;  // best first
  Metric metric = Metric::rmse;
};

/// Evaluates run_trials (reduced trial count is the caller's choice) for the
/// SCN+ variant at every (C, gamma) pair. Ranking: best test metric first,
/// ties broken by best train metric.
inline SweepResult hyper_search(const DataTable& table, const ExperimentConfig& config,
                                const SweepGrid& grid) {
  std::vector<std::pair<double, double>> pairs;
  if (grid.random) {
    if (grid.draws < 1) throw std::invalid_argument("hyper_search: draws must be >= 1");
    SplitStream stream(config.base_seed, stream_id::synthetic + 100);
    for (int i = 0; i < grid.draws; ++i) {
      const double c = std::pow(10.0, stream.uniform(std::log10(grid.c_lo), std::log10(grid.c_hi)));
      const double g = std::pow(10.0, stream.uniform(std::log10(grid.gamma_lo), std::log10(grid.gamma_hi)));
      pairs.emplace_back(c, g);
    }
  } else {
    if (grid.c_values.empty() || grid.gamma_values.empty())
      throw std::invalid_argument("hyper_search: empty grid");
    for (double c : grid.c_values)
      for (double g : grid.gamma_values) pairs.emplace_back(c, g);
  }

  SweepResult result;
  result.metric = config.metric;
  for (const auto& [c, g] : pairs) {
    ExperimentConfig point_config = config;
    point_config.train_config.lupi.C = c;
    point_config.train_config.lupi.gamma = g;
    const ExperimentResult r = run_trials(table, point_config, {Variant::scn_plus});
    const TrialStats& s = r.stats.at(Variant::scn_plus);
    result.points.push_back({c, g, s.train_ave, s.test_ave});
  }

  result.ranked = result.points;
  const bool higher_better = config.metric == Metric::accuracy;
  std::stable_sort(result.ranked.begin(), result.ranked.end(),
                   [higher_better](const SweepPoint& a, const SweepPoint& b) {
                     if (a.test_metric != b.test_metric)
                       return higher_better ? a.test_metric > b.test_metric
                                            : a.test_metric < b.test_metric;
                     return higher_better ? a.train_metric > b.train_metric
                                          : a.train_metric < b.train_metric;
                   });
  return result;
}

// --- table / CSV emission ---------------------------------------------------

/// Human-readable comparison table: AVE/DEV per train/test metric, plus the
/// node-count column in fixed-epsilon mode.
inline std::string format_table(const ExperimentResult& result) {
  const bool with_nodes = result.mode == FixedMode::fixed_epsilon;
  const char* metric_name = result.metric == Metric::accuracy ? "Accuracy (%)" : "RMSE";
  std::ostringstream out;
  out << std::left << std::setw(10) << "Algorithm" << std::right
      << std::setw(12) << "Train AVE" << std::setw(12) << "Train DEV"
      << std::setw(12) << "Test AVE" << std::setw(12) << "Test DEV";
  if (with_nodes) out << std::setw(10) << "L";
  out << "   [" << metric_name << "]\n";
  out << std::string(with_nodes ? 68 : 58, '-') << "\n";
  const int prec = result.metric == Metric::accuracy ? 2 : 4;
  for (const auto& [v, s] : result.stats) {
    out << std::left << std::setw(10) << to_string(v) << std::right << std::fixed
        << std::setprecision(prec) << std::setw(12) << s.train_ave << std::setw(12)
        << s.train_dev << std::setw(12) << s.test_ave << std::setw(12) << s.test_dev;
    if (with_nodes) out << std::setprecision(2) << std::setw(10) << s.ave_nodes;
    out << "\n";
  }
  return out.str();
}

/// Machine artifact mirroring format_table.
inline std::string table_csv(const ExperimentResult& result) {
  const bool with_nodes = result.mode == FixedMode::fixed_epsilon;
  std::ostringstream out;
  out << "variant,train_ave,train_dev,test_ave,test_dev";
  if (with_nodes) out << ",ave_nodes";
  out << "\n";
  out << std::setprecision(17);
  for (const auto& [v, s] : result.stats) {
    out << to_string(v) << "," << s.train_ave << "," << s.train_dev << ","
        << s.test_ave << "," << s.test_dev;
    if (with_nodes) out << "," << s.ave_nodes;
    out << "\n";
  }
  return out.str();
}

/// Per-trial records: seed, variant, train metric, test metric, node count,
/// wall time.
inline std::string per_trial_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "seed,variant,train_metric,test_metric,final_L,wall_time\n";
  out << std::setprecision(17);
  for (const auto& [v, s] : result.stats) {
    for (const auto& r : s.per_trial) {
      out << r.seed << "," << to_string(v) << "," << r.train_metric << ","
          << r.test_metric << "," << r.final_l << "," << r.wall_time_seconds << "\n";
    }
  }
  return out.str();
}

/// Sweep surface rows in evaluation order.
inline std::string sweep_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "C,gamma,train_metric,test_metric\n";
  out << std::setprecision(17);
  for (const auto& p : result.points) {
    out << p.c << "," << p.gamma << "," << p.train_metric << "," << p.test_metric << "\n";
  }
  return out.str();
}

}  // namespace scnplus
