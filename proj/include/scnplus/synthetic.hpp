#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>

#include "scnplus/dataset.hpp"
#include "scnplus/rng.hpp"
#include "scnplus/types.hpp"

namespace scnplus {

/// Ready-to-train matrices: normalized normal view, privileged view, targets.
struct SyntheticData {
  Matrix x;        // N x 1, uniform on [0, 1]
  Matrix x_tilde;  // N x 1, noisy copy of the target (the teacher hint)
  Matrix t;        // N x 1, sin(3x) (already inside [0, 1])
};

/// The sin(3x) regression task. The privileged column is the target plus
/// small uniform noise, so the LUPI variants have something real to exploit.
inline SyntheticData make_sin3x(int n, std::uint64_t seed) {
  SplitStream stream(seed, stream_id::synthetic);
  SyntheticData data;
  data.x.resize(n, 1);
  data.x_tilde.resize(n, 1);
  data.t.resize(n, 1);
  for (int i = 0; i < n; ++i) {
    const double x = stream.next_unit();
    const double y = std::sin(3.0 * x);
    data.x(i, 0) = x;
    data.t(i, 0) = y;
    data.x_tilde(i, 0) = y + 0.05 * (stream.next_unit() - 0.5);
  }
  return data;
}

/// Same task as a loadable table: attributes [x, hint], trailing target.
inline DataTable make_sin3x_table(int n, std::uint64_t seed) {
  const SyntheticData d = make_sin3x(n, seed);
  DataTable table;
  table.features.resize(n, 2);
  table.features.col(0) = d.x.col(0);
  table.features.col(1) = d.x_tilde.col(0);
  table.targets_raw.reserve(static_cast<std::size_t>(n));
  char buf[32];
  for (int i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", d.t(i, 0));
    table.targets_raw.emplace_back(buf);
  }
  table.column_names = {"x", "hint"};
  table.target_name = "target";
  return table;
}

/// Seeded Gaussian-blob classification table: 4 attributes, `classes` labels
/// c0..c{k-1} on a circle; the last two attributes are noisier copies so a
/// privileged halving stays informative either way.
inline DataTable make_blobs_table(int n, int classes, std::uint64_t seed) {
  if (classes < 2) throw DataError("make_blobs_table: need at least 2 classes");
  SplitStream stream(seed, stream_id::synthetic);
  auto gauss = [&stream]() {
    // Box-Muller
    const double u1 = std::max(stream.next_unit(), 1e-300);
    const double u2 = stream.next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  };
  DataTable table;
  table.features.resize(n, 4);
  table.targets_raw.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int c = i % classes;
    const double angle = 2.0 * M_PI * c / classes;
    const double cx = 2.0 * std::cos(angle);
    const double cy = 2.0 * std::sin(angle);
    table.features(i, 0) = cx + 0.6 * gauss();
    table.features(i, 1) = cy + 0.6 * gauss();
    table.features(i, 2) = cx + 1.2 * gauss();
    table.features(i, 3) = cy + 1.2 * gauss();
    table.targets_raw.push_back("c" + std::to_string(c));
  }
  table.column_names = {"f0", "f1", "f2", "f3"};
  table.target_name = "label";
  return table;
}

/// Writes a table as CSV (header row, trailing target column, full-precision
/// floats).
inline void write_csv(const std::string& path, const DataTable& table) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write CSV: " + path);
  for (int j = 0; j < table.n_attributes(); ++j) {
    out << (j < static_cast<int>(table.column_names.size())
                ? table.column_names[static_cast<std::size_t>(j)]
                : "f" + std::to_string(j))
        << ",";
  }
  out << (table.target_name.empty() ? "target" : table.target_name) << "\n";
  char buf[32];
  for (int i = 0; i < table.n_samples(); ++i) {
    for (int j = 0; j < table.n_attributes(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", table.features(i, j));
      out << buf << ",";
    }
    out << table.targets_raw[static_cast<std::size_t>(i)] << "\n";
  }
}

}  // namespace scnplus
