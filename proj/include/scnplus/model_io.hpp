#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scnplus/dataset.hpp"
#include "scnplus/trainers.hpp"
#include "scnplus/types.hpp"
#include "scnplus/version.hpp"

namespace scnplus {

/// FNV-1a 64-bit over a byte range; used to fingerprint dataset files.
inline std::uint64_t fnv1a64(const char* data, std::size_t size) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file for fingerprinting: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  return fnv1a64(bytes.data(), bytes.size());
}

inline std::string hex_u64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace detail {

inline nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const nlohmann::json& j, Eigen::Index cols_hint = 0) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = cols_hint;
  if (rows > 0) cols = static_cast<Eigen::Index>(j.at(0).size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = j.at(i).at(c).get<double>();
  return m;
}

inline nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

inline Vector vector_from_json(const nlohmann::json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j.at(i).get<double>();
  return v;
}

inline nlohmann::json nodes_to_json(const std::vector<HiddenNode>& nodes) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& n : nodes) out.push_back({{"w", vector_to_json(n.w)}, {"b", n.b}});
  return out;
}

inline std::vector<HiddenNode> nodes_from_json(const nlohmann::json& j) {
  std::vector<HiddenNode> nodes;
  for (const auto& n : j) nodes.push_back({vector_from_json(n.at("w")), n.at("b").get<double>()});
  return nodes;
}

}  // namespace detail

inline constexpr int kModelFormatVersion = 1;

/// Versioned JSON model file. Floats are emitted in the shortest base-10
/// form that round-trips exactly, so load(save(model)) predicts bit-
/// identically. The privileged half is persisted for audit but is never
/// consulted at prediction time.
inline nlohmann::json model_to_json(const Model& model) {
  nlohmann::json j;
  j["format_version"] = kModelFormatVersion;
  j["variant"] = to_string(model.variant);
  j["activation"] = to_string(model.activation);
  j["task"] = {{"kind", to_string(model.task_kind)},
               {"class_labels", model.class_labels},
               {"target_min", model.target_min},
               {"target_max", model.target_max}};
  j["nodes"] = detail::nodes_to_json(model.nodes);
  j["beta"] = detail::matrix_to_json(model.beta);
  j["n_outputs"] = model.n_outputs();
  if (uses_privileged(model.variant)) {
    j["privileged"] = {{"test_time_used", false},
                       {"nodes", detail::nodes_to_json(model.priv_nodes)},
                       {"beta_tilde", detail::matrix_to_json(model.beta_tilde)}};
  }
  if (model.preproc) {
    j["normalization"] = {{"col_min", detail::vector_to_json(model.preproc->norm.col_min)},
                          {"col_max", detail::vector_to_json(model.preproc->norm.col_max)},
                          {"fitted_on", model.preproc->norm.fitted_on}};
    j["split"] = split_to_json(model.preproc->split);
  }
  return j;
}

inline Model model_from_json(const nlohmann::json& j) {
  const int version = j.at("format_version").get<int>();
  if (version != kModelFormatVersion)
    throw DataError("unsupported model format version " + std::to_string(version));
  Model model;
  model.variant = variant_from_string(j.at("variant").get<std::string>());
  model.activation = activation_from_string(j.at("activation").get<std::string>());
  const auto& task = j.at("task");
  model.task_kind = task_kind_from_string(task.at("kind").get<std::string>());
  model.class_labels = task.at("class_labels").get<std::vector<std::string>>();
  model.target_min = task.at("target_min").get<double>();
  model.target_max = task.at("target_max").get<double>();
  model.nodes = detail::nodes_from_json(j.at("nodes"));
  const auto m = j.at("n_outputs").get<Eigen::Index>();
  model.beta = detail::matrix_from_json(j.at("beta"), m);
  if (j.contains("privileged")) {
    model.priv_nodes = detail::nodes_from_json(j.at("privileged").at("nodes"));
    model.beta_tilde = detail::matrix_from_json(j.at("privileged").at("beta_tilde"), m);
  } else {
    model.beta_tilde.resize(0, 0);
  }
  if (j.contains("normalization")) {
    ModelPreproc pp;
    pp.norm.col_min = detail::vector_from_json(j.at("normalization").at("col_min"));
    pp.norm.col_max = detail::vector_from_json(j.at("normalization").at("col_max"));
    pp.norm.fitted_on = j.at("normalization").at("fitted_on").get<int>();
    pp.split = split_from_json(j.at("split"));
    model.preproc = std::move(pp);
  }
  return model;
}

inline void save_model(const std::string& path, const Model& model) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file: " + path);
  out << model_to_json(model).dump(2) << "\n";
}

inline Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read model file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed model file " + path + ": " + e.what());
  }
  return model_from_json(j);
}

/// Everything needed to replay a run bit-exactly on the same machine:
/// config snapshot, dataset content hash, the feature split, and seeds.
struct RunManifest {
  nlohmann::json config_snapshot;
  std::string dataset_path;
  std::uint64_t dataset_fingerprint = 0;
  FeatureSplit split;
  std::uint64_t base_seed = 0;
  std::string tool_version = kVersion;
};

inline nlohmann::json manifest_to_json(const RunManifest& m) {
  return nlohmann::json{{"tool_version", m.tool_version},
                        {"base_seed", m.base_seed},
                        {"dataset",
                         {{"path", m.dataset_path},
                          {"fnv1a64", hex_u64(m.dataset_fingerprint)}}},
                        {"split", split_to_json(m.split)},
                        {"config", m.config_snapshot}};
}

inline void write_manifest(const std::string& path, const RunManifest& m) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write run manifest: " + path);
  out << manifest_to_json(m).dump(2) << "\n";
}

}  // namespace scnplus
