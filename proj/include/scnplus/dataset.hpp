#pragma once

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scnplus/rng.hpp"
#include "scnplus/types.hpp"

namespace scnplus {

/// Loaded tabular data: raw feature matrix plus the untyped target column.
struct DataTable {
  Matrix features;                        // N x p
  std::vector<std::string> targets_raw;   // length N
  std::vector<std::string> column_names;  // feature names (empty if no header)
  std::string target_name;                // empty if no header

  int n_samples() const { return static_cast<int>(features.rows()); }
  int n_attributes() const { return static_cast<int>(features.cols()); }
};

/// Which attributes form the normal view and which the privileged view.
struct FeatureSplit {
  std::vector<int> normal_indices;
  std::vector<int> privileged_indices;
  std::uint64_t seed = 0;
};

/// Per-column min/max fitted on training rows only. Columns with max == min
/// are degenerate and map to 0.
struct NormalizationParams {
  Vector col_min;
  Vector col_max;
  int fitted_on = 0;

  int n_columns() const { return static_cast<int>(col_min.size()); }
  bool degenerate(int col) const { return col_max[col] == col_min[col]; }
};

/// Encoded target matrix: one-hot rows for classification, a single
/// min-max-normalized column for regression.
struct EncodedTargets {
  Matrix T;  // N x m
  TaskKind task_kind = TaskKind::regression;
  std::vector<std::string> class_labels;  // classification only
  double target_min = 0.0;                // regression scaling, fitted rows
  double target_max = 0.0;

  int n_outputs() const { return static_cast<int>(T.cols()); }
};

/// Selects the target column: by header name, or the trailing column.
struct TargetSpec {
  std::optional<std::string> name;
  static TargetSpec trailing() { return {}; }
  static TargetSpec by_name(std::string n) { return {std::move(n)}; }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline bool parse_double(const std::string& cell, double& out) {
  const std::string t = trim(cell);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline void strip_bom(std::string& line) {
  if (line.size() >= 3 && line[0] == '\xEF' && line[1] == '\xBB' && line[2] == '\xBF')
    line.erase(0, 3);
}

}  // namespace detail

/// Loads a comma-delimited CSV. The first row is treated as a header iff any
/// of its cells does not parse as a real number. Every non-target cell must
/// parse as a real number; rows with missing or malformed feature cells are
/// rejected (no imputation).
inline DataTable load_csv(const std::string& path,
                          const TargetSpec& target = TargetSpec::trailing()) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file: " + path);

  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool first_line = true;
  while (std::getline(in, line)) {
    if (first_line) {
      detail::strip_bom(line);
      first_line = false;
    }
    if (detail::trim(line).empty()) continue;
    rows.push_back(detail::split_line(line));
  }
  if (rows.empty()) throw DataError("empty dataset file: " + path);

  const std::size_t width = rows.front().size();
  if (width < 2)
    throw DataError(path + ": need at least 2 columns (features + target)");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != width) {
      throw DataError(path + ": row " + std::to_string(i + 1) + " has " +
                      std::to_string(rows[i].size()) + " cells, expected " +
                      std::to_string(width));
    }
  }

  // Header iff any first-row cell is non-numeric.
  double scratch = 0.0;
  const bool has_header =
      std::any_of(rows.front().begin(), rows.front().end(),
                  [&](const std::string& c) { return !detail::parse_double(c, scratch); });

  std::vector<std::string> names;
  std::size_t first_data_row = 0;
  if (has_header) {
    names = rows.front();
    first_data_row = 1;
    if (rows.size() == 1) throw DataError(path + ": header only, no data rows");
  }

  std::size_t target_col = width - 1;
  if (target.name) {
    if (!has_header)
      throw DataError(path + ": target column requested by name but file has no header");
    const auto it = std::find(names.begin(), names.end(), *target.name);
    if (it == names.end())
      throw DataError(path + ": no column named '" + *target.name + "'");
    target_col = static_cast<std::size_t>(it - names.begin());
  }

  const std::size_t n = rows.size() - first_data_row;
  const std::size_t p = width - 1;
  if (p < 2)
    throw DataError(path + ": need at least 2 feature attributes, got " +
                    std::to_string(p));

  DataTable table;
  table.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  table.targets_raw.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& cells = rows[first_data_row + i];
    std::size_t out_col = 0;
    for (std::size_t j = 0; j < width; ++j) {
      if (j == target_col) continue;
      double v = 0.0;
      if (!detail::parse_double(cells[j], v)) {
        // Row/column reported as 1-based file coordinates.
        throw DataError(path + ": parse error at row " +
                        std::to_string(first_data_row + i + 1) + ", column " +
                        std::to_string(j + 1) + ": '" + cells[j] + "'");
      }
      table.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(out_col++)) = v;
    }
    table.targets_raw.push_back(cells[target_col]);
  }

  if (has_header) {
    for (std::size_t j = 0; j < width; ++j) {
      if (j == target_col) continue;
      table.column_names.push_back(names[j]);
    }
    table.target_name = names[target_col];
  }
  return table;
}

/// Loads a CSV with no target column: every cell is a feature. Same header
/// auto-detection and parse rules as load_csv.
inline Matrix load_features_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file: " + path);

  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool first_line = true;
  while (std::getline(in, line)) {
    if (first_line) {
      detail::strip_bom(line);
      first_line = false;
    }
    if (detail::trim(line).empty()) continue;
    rows.push_back(detail::split_line(line));
  }
  if (rows.empty()) throw DataError("empty dataset file: " + path);

  const std::size_t width = rows.front().size();
  double scratch = 0.0;
  const bool has_header =
      std::any_of(rows.front().begin(), rows.front().end(),
                  [&](const std::string& c) { return !detail::parse_double(c, scratch); });
  const std::size_t first = has_header ? 1 : 0;
  if (rows.size() == first) throw DataError(path + ": header only, no data rows");

  Matrix out(static_cast<Eigen::Index>(rows.size() - first), static_cast<Eigen::Index>(width));
  for (std::size_t i = first; i < rows.size(); ++i) {
    if (rows[i].size() != width)
      throw DataError(path + ": row " + std::to_string(i + 1) + " has " +
                      std::to_string(rows[i].size()) + " cells, expected " +
                      std::to_string(width));
    for (std::size_t j = 0; j < width; ++j) {
      double v = 0.0;
      if (!detail::parse_double(rows[i][j], v))
        throw DataError(path + ": parse error at row " + std::to_string(i + 1) +
                        ", column " + std::to_string(j + 1) + ": '" + rows[i][j] + "'");
      out(static_cast<Eigen::Index>(i - first), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return out;
}

/// Randomly halves the attribute set into normal and privileged views.
/// Deterministic given the seed; when p is odd the normal side gets the
/// extra attribute. Index lists come back sorted.
inline FeatureSplit split_privileged(const DataTable& table, std::uint64_t seed) {
  const int p = table.n_attributes();
  if (p < 2) throw DataError("split_privileged: need at least 2 attributes");

  std::vector<int> idx(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) idx[static_cast<std::size_t>(i)] = i;
  SplitStream stream(seed, stream_id::attr_split);
  stream.shuffle(idx);

  const int n = (p + 1) / 2;
  FeatureSplit split;
  split.seed = seed;
  split.normal_indices.assign(idx.begin(), idx.begin() + n);
  split.privileged_indices.assign(idx.begin() + n, idx.end());
  std::sort(split.normal_indices.begin(), split.normal_indices.end());
  std::sort(split.privileged_indices.begin(), split.privileged_indices.end());
  return split;
}

/// Fits per-column min/max on the given training rows only.
inline NormalizationParams fit_normalizer(const DataTable& table,
                                          const std::vector<int>& rows) {
  if (rows.empty()) throw DataError("fit_normalizer: empty training row set");
  const int p = table.n_attributes();
  NormalizationParams params;
  params.col_min = Vector::Constant(p, std::numeric_limits<double>::infinity());
  params.col_max = Vector::Constant(p, -std::numeric_limits<double>::infinity());
  params.fitted_on = static_cast<int>(rows.size());
  for (int r : rows) {
    for (int c = 0; c < p; ++c) {
      const double v = table.features(r, c);
      params.col_min[c] = std::min(params.col_min[c], v);
      params.col_max[c] = std::max(params.col_max[c], v);
    }
  }
  return params;
}

inline double normalize_value(const NormalizationParams& params, int col, double v) {
  if (params.degenerate(col)) return 0.0;
  const double u = (v - params.col_min[col]) / (params.col_max[col] - params.col_min[col]);
  return std::clamp(u, 0.0, 1.0);
}

/// Maps every value to (v - min)/(max - min), clamped to [0, 1]. Degenerate
/// columns map to 0. Applied unchanged to test rows.
inline Matrix apply_normalizer(const NormalizationParams& params, const Matrix& m) {
  if (m.cols() != params.n_columns())
    throw DataError("apply_normalizer: column count mismatch (" +
                    std::to_string(m.cols()) + " vs " +
                    std::to_string(params.n_columns()) + ")");
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      out(r, c) = normalize_value(params, static_cast<int>(c), m(r, c));
  return out;
}

/// Encodes targets. Classification: one-hot over labels in first-appearance
/// order. Regression: single column, min-max normalized (fitted on fit_rows,
/// or all rows when fit_rows is empty), clamped like features.
inline EncodedTargets encode_targets(const DataTable& table, TaskKind kind,
                                     const std::vector<int>& fit_rows = {}) {
  const int n = table.n_samples();
  EncodedTargets enc;
  enc.task_kind = kind;

  if (kind == TaskKind::classification) {
    std::vector<std::string> labels;
    std::vector<int> label_of(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const std::string& raw = table.targets_raw[static_cast<std::size_t>(i)];
      auto it = std::find(labels.begin(), labels.end(), raw);
      if (it == labels.end()) {
        labels.push_back(raw);
        it = labels.end() - 1;
      }
      label_of[static_cast<std::size_t>(i)] = static_cast<int>(it - labels.begin());
    }
    if (labels.size() < 2)
      throw DataError("encode_targets: classification needs at least 2 classes");
    const int m = static_cast<int>(labels.size());
    enc.T = Matrix::Zero(n, m);
    for (int i = 0; i < n; ++i) enc.T(i, label_of[static_cast<std::size_t>(i)]) = 1.0;
    enc.class_labels = std::move(labels);
    return enc;
  }

  Vector raw(n);
  for (int i = 0; i < n; ++i) {
    double v = 0.0;
    if (!detail::parse_double(table.targets_raw[static_cast<std::size_t>(i)], v))
      throw DataError("encode_targets: non-numeric regression target at row " +
                      std::to_string(i + 1) + ": '" +
                      table.targets_raw[static_cast<std::size_t>(i)] + "'");
    raw[i] = v;
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  if (fit_rows.empty()) {
    lo = raw.minCoeff();
    hi = raw.maxCoeff();
  } else {
    for (int r : fit_rows) {
      lo = std::min(lo, raw[r]);
      hi = std::max(hi, raw[r]);
    }
  }
  enc.target_min = lo;
  enc.target_max = hi;
  enc.T.resize(n, 1);
  for (int i = 0; i < n; ++i) {
    enc.T(i, 0) = (hi == lo) ? 0.0 : std::clamp((raw[i] - lo) / (hi - lo), 0.0, 1.0);
  }
  return enc;
}

/// Seeded shuffle then prefix split. The two index sets are disjoint,
/// exhaustive, and returned sorted.
inline std::pair<std::vector<int>, std::vector<int>> split_train_test(
    const DataTable& table, int n_train, std::uint64_t seed) {
  const int n = table.n_samples();
  if (n_train <= 0 || n_train >= n)
    throw DataError("split_train_test: n_train must be in [1, N-1], got " +
                    std::to_string(n_train) + " for N=" + std::to_string(n));
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  SplitStream stream(seed, stream_id::row_shuffle);
  stream.shuffle(idx);
  std::vector<int> train(idx.begin(), idx.begin() + n_train);
  std::vector<int> test(idx.begin() + n_train, idx.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

/// Selects a subset of rows (sorted index list) from a matrix.
inline Matrix select_rows(const Matrix& m, const std::vector<int>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

/// Selects a subset of columns from a matrix.
inline Matrix select_cols(const Matrix& m, const std::vector<int>& cols) {
  Matrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = m.col(cols[j]);
  return out;
}

// --- split-record JSON ({"seed": u64, "normal": [...], "privileged": [...]}) ---

inline nlohmann::json split_to_json(const FeatureSplit& split) {
  return nlohmann::json{{"seed", split.seed},
                        {"normal", split.normal_indices},
                        {"privileged", split.privileged_indices}};
}

inline FeatureSplit split_from_json(const nlohmann::json& j) {
  FeatureSplit split;
  split.seed = j.at("seed").get<std::uint64_t>();
  split.normal_indices = j.at("normal").get<std::vector<int>>();
  split.privileged_indices = j.at("privileged").get<std::vector<int>>();
  return split;
}

inline void write_split_record(const std::string& path, const FeatureSplit& split) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write split record: " + path);
  out << split_to_json(split).dump(2) << "\n";
}

inline FeatureSplit read_split_record(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read split record: " + path);
  nlohmann::json j;
  in >> j;
  return split_from_json(j);
}

}  // namespace scnplus
