#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace scnplus {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

enum class Variant { scn, scn_plus, irvfl, irvfl_plus };
enum class Activation { sigmoid, tanh };
enum class TaskKind { regression, classification };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::scn: return "scn";
    case Variant::scn_plus: return "scn+";
    case Variant::irvfl: return "irvfl";
    case Variant::irvfl_plus: return "irvfl+";
  }
  return "?";
}

inline const char* to_string(Activation a) {
  return a == Activation::sigmoid ? "sigmoid" : "tanh";
}

inline const char* to_string(TaskKind k) {
  return k == TaskKind::regression ? "regression" : "classification";
}

Variant variant_from_string(const std::string& s);
Activation activation_from_string(const std::string& s);
TaskKind task_kind_from_string(const std::string& s);

/// True for the two LUPI variants, which consume privileged features.
inline bool uses_privileged(Variant v) {
  return v == Variant::scn_plus || v == Variant::irvfl_plus;
}

/// True for the two supervised variants, which filter candidates by xi >= 0.
inline bool uses_supervision(Variant v) {
  return v == Variant::scn || v == Variant::scn_plus;
}

/// Bad input data (file I/O, parse errors, shape mismatches).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Training could not make progress (every candidate degenerate).
class TrainingError : public std::runtime_error {
 public:
  explicit TrainingError(const std::string& what) : std::runtime_error(what) {}
};

inline Variant variant_from_string(const std::string& s) {
  if (s == "scn") return Variant::scn;
  if (s == "scn+" || s == "scn_plus" || s == "scnplus") return Variant::scn_plus;
  if (s == "irvfl") return Variant::irvfl;
  if (s == "irvfl+" || s == "irvfl_plus") return Variant::irvfl_plus;
  throw std::invalid_argument("unknown variant: " + s);
}

inline Activation activation_from_string(const std::string& s) {
  if (s == "sigmoid") return Activation::sigmoid;
  if (s == "tanh") return Activation::tanh;
  throw std::invalid_argument("unknown activation: " + s);
}

inline TaskKind task_kind_from_string(const std::string& s) {
  if (s == "regression") return TaskKind::regression;
  if (s == "classification") return TaskKind::classification;
  throw std::invalid_argument("unknown task kind: " + s);
}

}  // namespace scnplus
