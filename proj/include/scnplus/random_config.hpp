#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "scnplus/rng.hpp"
#include "scnplus/types.hpp"

namespace scnplus {

/// The adaptive scale set: candidate weights and biases are drawn uniformly
/// from [-lambda, lambda] for each lambda in turn, t_max candidates per scale.
struct ScaleSchedule {
  std::vector<double> lambdas;
  int t_max = 10;

  /// {1, 2, ..., 10} with 10 candidates per scale (SCN / SCN+).
  static ScaleSchedule scn_default() {
    ScaleSchedule s;
    for (int i = 1; i <= 10; ++i) s.lambdas.push_back(static_cast<double>(i));
    s.t_max = 10;
    return s;
  }

  /// {10} with a single candidate per node (IRVFL / IRVFL+).
  static ScaleSchedule irvfl_default() {
    ScaleSchedule s;
    s.lambdas = {10.0};
    s.t_max = 1;
    return s;
  }

  void validate() const {
    if (lambdas.empty()) throw std::invalid_argument("ScaleSchedule: empty lambda set");
    if (t_max < 1) throw std::invalid_argument("ScaleSchedule: t_max must be >= 1");
    double prev = 0.0;
    for (double l : lambdas) {
      if (l <= prev)
        throw std::invalid_argument("ScaleSchedule: lambdas must be strictly increasing and positive");
      prev = l;
    }
  }
};

/// One randomly configured hidden node: weights/bias for the normal view and
/// (when d > 0) for the privileged view.
struct CandidateNode {
  Vector w;        // length n
  double b = 0.0;
  Vector w_tilde;  // length d; size 0 when the variant has no privileged part
  double b_tilde = 0.0;
  double lambda_used = 0.0;
  int candidate_index = 0;
};

/// Draws one candidate with every component i.i.d. uniform on [-lambda, lambda].
/// Pure function of (seed, stream_id, lambda, index): the same substream always
/// yields the same candidate, so pools can be evaluated in any order.
inline CandidateNode sample_candidate(SplitStream stream, double lambda, int n,
                                      int d, int index) {
  if (lambda <= 0.0) throw std::invalid_argument("sample_candidate: lambda must be positive");
  if (n < 1) throw std::invalid_argument("sample_candidate: n must be >= 1");
  if (d < 0) throw std::invalid_argument("sample_candidate: d must be >= 0");

  CandidateNode c;
  c.lambda_used = lambda;
  c.candidate_index = index;
  c.w.resize(n);
  for (int i = 0; i < n; ++i) c.w[i] = stream.uniform(-lambda, lambda);
  c.b = stream.uniform(-lambda, lambda);
  c.w_tilde.resize(d);
  for (int i = 0; i < d; ++i) c.w_tilde[i] = stream.uniform(-lambda, lambda);
  if (d > 0) c.b_tilde = stream.uniform(-lambda, lambda);
  return c;
}

inline double activate(Activation g, double z) {
  switch (g) {
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-z));
    case Activation::tanh: return std::tanh(z);
  }
  return 0.0;
}

/// Hidden output vectors h_i = G(<w, x_i> + b) and, when the candidate has a
/// privileged part, ht_i = G(<w~, x~_i> + b~). The privileged half comes back
/// empty when d == 0.
inline std::pair<Vector, Vector> hidden_output(const CandidateNode& c,
                                               const Matrix& x,
                                               const Matrix& x_tilde,
                                               Activation g) {
  if (x.cols() != c.w.size())
    throw DataError("hidden_output: normal feature width " + std::to_string(x.cols()) +
                    " does not match candidate (" + std::to_string(c.w.size()) + ")");
  const int d = static_cast<int>(c.w_tilde.size());
  if (d > 0 && (x_tilde.cols() != d || x_tilde.rows() != x.rows()))
    throw DataError("hidden_output: privileged feature shape mismatch");

  Vector h = x * c.w;
  h.array() += c.b;
  for (Eigen::Index i = 0; i < h.size(); ++i) h[i] = activate(g, h[i]);

  Vector ht;
  if (d > 0) {
    ht = x_tilde * c.w_tilde;
    ht.array() += c.b_tilde;
    for (Eigen::Index i = 0; i < ht.size(); ++i) ht[i] = activate(g, ht[i]);
  }
  return {std::move(h), std::move(ht)};
}

}  // namespace scnplus
