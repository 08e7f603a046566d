#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scnplus/dataset.hpp"
#include "scnplus/random_config.hpp"
#include "scnplus/rng.hpp"
#include "scnplus/solvers.hpp"
#include "scnplus/types.hpp"

namespace scnplus {

enum class StopReason { tolerance_met, lmax_reached };
enum class ToleranceNorm { rmse, frobenius };

inline const char* to_string(StopReason s) {
  return s == StopReason::tolerance_met ? "tolerance_met" : "lmax_reached";
}

struct TrainConfig {
  Variant variant = Variant::scn_plus;
  int l_max = 100;
  double epsilon = 0.0;
  ToleranceNorm tolerance_norm = ToleranceNorm::rmse;
  ScaleSchedule schedule = ScaleSchedule::scn_default();
  double r_init = 0.9;
  LupiParams lupi;
  Activation activation = Activation::sigmoid;
  std::uint64_t seed = 0;
  int renewal_cap = 10;

  /// IRVFL variants always run the single-scale, single-candidate schedule.
  TrainConfig normalized() const {
    TrainConfig c = *this;
    if (c.variant == Variant::irvfl || c.variant == Variant::irvfl_plus)
      c.schedule = ScaleSchedule::irvfl_default();
    c.schedule.validate();
    if (!(c.r_init > 0.0 && c.r_init < 1.0))
      throw std::invalid_argument("TrainConfig: r_init must be in (0,1)");
    if (c.l_max < 1) throw std::invalid_argument("TrainConfig: l_max must be >= 1");
    if (c.epsilon < 0.0) throw std::invalid_argument("TrainConfig: epsilon must be >= 0");
    if (uses_privileged(c.variant)) c.lupi.validate();
    return c;
  }
};

struct HiddenNode {
  Vector w;
  double b = 0.0;
};

/// Preprocessing carried by a model trained from a raw table: the fitted
/// normalization over all attributes and the normal/privileged halving.
struct ModelPreproc {
  NormalizationParams norm;
  FeatureSplit split;
};

/// A trained network. Prediction reads only the normal-side nodes and beta;
/// the privileged half is persisted for audit and never used at test time.
struct Model {
  Variant variant = Variant::scn;
  Activation activation = Activation::sigmoid;
  std::vector<HiddenNode> nodes;
  std::vector<HiddenNode> priv_nodes;
  Matrix beta;        // L x m
  Matrix beta_tilde;  // L x m (0 x m for SCN/IRVFL)
  TaskKind task_kind = TaskKind::regression;
  std::vector<std::string> class_labels;  // classification only
  double target_min = 0.0;                // regression target scaling (audit)
  double target_max = 1.0;
  std::optional<ModelPreproc> preproc;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int n_outputs() const { return static_cast<int>(beta.cols()); }
  int input_dim() const { return nodes.empty() ? 0 : static_cast<int>(nodes.front().w.size()); }
};

/// Residual bookkeeping: e = T - f_L on the training set.
struct ResidualState {
  Matrix e;
  RowVector sq_norm_per_dim;
  double rmse = 0.0;

  static ResidualState init(const Matrix& t) {
    ResidualState s;
    s.e = t;
    s.refresh();
    return s;
  }

  void subtract(const Matrix& contribution) {
    e -= contribution;
    refresh();
  }

  void refresh() {
    sq_norm_per_dim = e.colwise().squaredNorm();
    const double n = static_cast<double>(e.rows()) * static_cast<double>(e.cols());
    rmse = n > 0 ? std::sqrt(e.squaredNorm() / n) : 0.0;
  }

  double frobenius() const { return e.norm(); }
};

/// Per-node trace kept for diagnostics and invariant checks.
struct NodeDiagnostics {
  double lambda = 0.0;
  int candidate_index = 0;
  int sweep_index = 0;
  double r_used = 0.0;
  double mu_used = 0.0;
  double xi_total = 0.0;
  double xi_min = 0.0;
  double sq_norm_before = 0.0;
  double sq_norm_after = 0.0;
  int pool_size = 0;
  bool forced = false;  // accepted via renewal-cap fallback, not via xi >= 0
};

struct TrainReport {
  int final_l = 0;
  std::vector<double> rmse_history;  // one entry per accepted node
  int r_renewals = 0;
  long candidates_evaluated = 0;
  double wall_time_seconds = 0.0;
  StopReason stop_reason = StopReason::lmax_reached;
  std::vector<NodeDiagnostics> node_diags;
};

struct TrainResult {
  Model model;
  TrainReport report;
};

namespace detail {

struct Evaluated {
  CandidateNode candidate;
  Vector h;
  Vector h_tilde;
  std::optional<LupiWeights> weights;  // set for LUPI variants
  SupervisionState supervision;
  int sweep_index = 0;
};

}  // namespace detail

/// Trains one network on normalized data. `x` is N x n, `t` is N x m;
/// `x_tilde` (N x d) is consumed only by the LUPI variants and may be empty
/// otherwise.
///
/// Per node: reset r; sweep the scale set, drawing t_max candidates per
/// scale from index-derived substreams; supervised variants keep only
/// candidates with min_q xi_q >= 0 and install the pool's argmax of
/// sum_q xi_q (ties to the lowest candidate index); if every scale fails,
/// renew r <- r + tau, tau ~ U(0, 1-r), up to renewal_cap sweeps, after
/// which the best-scoring candidate seen is installed regardless of
/// feasibility. Stops when the tolerance is met or l_max nodes are placed.
inline TrainResult train(const Matrix& x, const Matrix& x_tilde, const Matrix& t,
                         const TrainConfig& raw_config) {
  const auto t0 = std::chrono::steady_clock::now();
  const TrainConfig config = raw_config.normalized();

  const int n_samples = static_cast<int>(x.rows());
  const int n = static_cast<int>(x.cols());
  const int m = static_cast<int>(t.cols());
  if (n_samples < 1 || n < 1) throw DataError("train: empty feature matrix");
  if (t.rows() != n_samples) throw DataError("train: target row count mismatch");

  const bool lupi = uses_privileged(config.variant);
  const int d = lupi ? static_cast<int>(x_tilde.cols()) : 0;
  if (lupi) {
    if (x_tilde.rows() != n_samples || d < 1)
      throw DataError("train: privileged features required for " +
                      std::string(to_string(config.variant)));
  }

  Model model;
  model.variant = config.variant;
  model.activation = config.activation;
  model.beta.resize(0, m);
  model.beta_tilde.resize(0, lupi ? m : 0);

  TrainReport report;
  ResidualState residual = ResidualState::init(t);

  const auto tolerance_met = [&](const ResidualState& r) {
    const double measure = config.tolerance_norm == ToleranceNorm::rmse
                               ? r.rmse
                               : r.frobenius();
    return measure <= config.epsilon;
  };

  auto finish = [&](StopReason reason) {
    report.stop_reason = reason;
    report.final_l = model.node_count();
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return TrainResult{std::move(model), std::move(report)};
  };

  if (tolerance_met(residual)) return finish(StopReason::tolerance_met);

  SplitStream renewal_stream(config.seed, stream_id::r_renewal);
  const int n_scales = static_cast<int>(config.schedule.lambdas.size());
  const Matrix empty_priv(n_samples, 0);
  const Matrix& xt = lupi ? x_tilde : empty_priv;

  for (int node_index = 1; node_index <= config.l_max; ++node_index) {
    double r = config.r_init;
    std::optional<detail::Evaluated> chosen;
    std::optional<detail::Evaluated> best_seen;  // across all sweeps of this node
    bool forced = false;
    int pool_size = 0;

    for (int renewal = 0; !chosen; ++renewal) {
      for (int scale_index = 0; scale_index < n_scales && !chosen; ++scale_index) {
        const int sweep = renewal * n_scales + scale_index;
        const double lambda = config.schedule.lambdas[static_cast<std::size_t>(scale_index)];
        std::optional<detail::Evaluated> pool_best;

        for (int c = 0; c < config.schedule.t_max; ++c) {
          SplitStream stream(config.seed, stream_id::candidate(node_index, sweep, c));
          detail::Evaluated ev;
          ev.sweep_index = sweep;
          ev.candidate = sample_candidate(stream, lambda, n, lupi ? d : 0, c);
          auto [h, ht] = hidden_output(ev.candidate, x, xt, config.activation);
          ev.h = std::move(h);
          ev.h_tilde = std::move(ht);
          ++report.candidates_evaluated;

          if (ev.h.squaredNorm() <= 0.0) continue;  // degenerate
          const double mu = mu_schedule(r, node_index);
          if (lupi) {
            ev.weights = lupi_beta(residual.e, ev.h, ev.h_tilde, config.lupi);
            if (!ev.weights) continue;  // degenerate denominator
            ev.supervision = supervise_scn_plus(residual.e, ev.h, ev.h_tilde,
                                                *ev.weights, r, mu);
          } else {
            ev.supervision = supervise_scn(residual.e, ev.h, r, mu);
          }

          if (!best_seen || ev.supervision.xi_total > best_seen->supervision.xi_total)
            best_seen = ev;
          if (uses_supervision(config.variant) && !ev.supervision.admissible())
            continue;
          ++pool_size;
          if (!pool_best || ev.supervision.xi_total > pool_best->supervision.xi_total)
            pool_best = std::move(ev);
        }

        if (pool_best) chosen = std::move(pool_best);
      }

      if (!chosen) {
        if (renewal >= config.renewal_cap) {
          if (!best_seen) {
            throw TrainingError(
                "train: every candidate degenerate for node " +
                std::to_string(node_index) + " after " +
                std::to_string(config.renewal_cap) + " r-renewals");
          }
          chosen = std::move(best_seen);
          forced = true;
          break;
        }
        const double tau = renewal_stream.uniform(0.0, 1.0 - r);
        r += tau;
        ++report.r_renewals;
      }
    }

    // Output weight determination and residual update.
    NodeDiagnostics diag;
    diag.lambda = chosen->candidate.lambda_used;
    diag.candidate_index = chosen->candidate.candidate_index;
    diag.sweep_index = chosen->sweep_index;
    diag.r_used = chosen->supervision.r;
    diag.mu_used = chosen->supervision.mu;
    diag.xi_total = chosen->supervision.xi_total;
    diag.xi_min = chosen->supervision.xi_per_dim.minCoeff();
    diag.sq_norm_before = residual.e.squaredNorm();
    diag.pool_size = pool_size;
    diag.forced = forced;

    RowVector beta_row;
    RowVector beta_tilde_row;
    if (lupi) {
      beta_row = chosen->weights->beta;
      beta_tilde_row = chosen->weights->beta_tilde;
    } else {
      beta_row = scn_beta(residual.e, chosen->h);
    }

    Matrix contribution = chosen->h * beta_row;
    if (lupi) contribution += chosen->h_tilde * beta_tilde_row;
    residual.subtract(contribution);
    diag.sq_norm_after = residual.e.squaredNorm();

    model.nodes.push_back({chosen->candidate.w, chosen->candidate.b});
    model.beta.conservativeResize(model.beta.rows() + 1, m);
    model.beta.row(model.beta.rows() - 1) = beta_row;
    if (lupi) {
      model.priv_nodes.push_back({chosen->candidate.w_tilde, chosen->candidate.b_tilde});
      model.beta_tilde.conservativeResize(model.beta_tilde.rows() + 1, m);
      model.beta_tilde.row(model.beta_tilde.rows() - 1) = beta_tilde_row;
    }

    report.rmse_history.push_back(residual.rmse);
    report.node_diags.push_back(diag);

    if (tolerance_met(residual)) return finish(StopReason::tolerance_met);
  }

  return finish(StopReason::lmax_reached);
}

/// Hidden-layer matrix for the normal view: H(i, j) = G(<w_j, x_i> + b_j).
inline Matrix hidden_matrix(const Model& model, const Matrix& x_normal) {
  const int l = model.node_count();
  Matrix h(x_normal.rows(), l);
  for (int j = 0; j < l; ++j) {
    const HiddenNode& node = model.nodes[static_cast<std::size_t>(j)];
    Vector col = x_normal * node.w;
    col.array() += node.b;
    for (Eigen::Index i = 0; i < col.size(); ++i)
      col[i] = activate(model.activation, col[i]);
    h.col(j) = col;
  }
  return h;
}

/// Predicts from raw test features. When the model carries preprocessing,
/// `z` must have the full attribute set: the model picks its normal
/// attributes and applies the stored normalization; privileged columns are
/// never read. Without preprocessing `z` is taken as the already-normalized
/// normal view.
inline Matrix predict(const Model& model, const Matrix& z) {
  Matrix x_normal;
  if (model.preproc) {
    const auto& pp = *model.preproc;
    if (z.cols() != pp.norm.n_columns())
      throw DataError("predict: expected " + std::to_string(pp.norm.n_columns()) +
                      " attributes, got " + std::to_string(z.cols()));
    const auto& idx = pp.split.normal_indices;
    x_normal.resize(z.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j)
      for (Eigen::Index i = 0; i < z.rows(); ++i)
        x_normal(i, static_cast<Eigen::Index>(j)) =
            normalize_value(pp.norm, idx[j], z(i, idx[j]));
  } else {
    if (model.node_count() > 0 && z.cols() != model.input_dim())
      throw DataError("predict: expected " + std::to_string(model.input_dim()) +
                      " normalized features, got " + std::to_string(z.cols()));
    x_normal = z;
  }

  if (model.node_count() == 0)
    return Matrix::Zero(z.rows(), model.n_outputs());
  return hidden_matrix(model, x_normal) * model.beta;
}

/// Argmax decode of the m-output network; ties break to the lowest class
/// index.
inline std::vector<std::string> predict_labels(const Model& model, const Matrix& z) {
  if (model.task_kind != TaskKind::classification)
    throw DataError("predict_labels: model is not a classifier");
  const Matrix f = predict(model, z);
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(f.rows()));
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    int arg = 0;
    for (Eigen::Index q = 1; q < f.cols(); ++q)
      if (f(i, q) > f(i, arg)) arg = static_cast<int>(q);
    labels.push_back(model.class_labels[static_cast<std::size_t>(arg)]);
  }
  return labels;
}

}  // namespace scnplus
