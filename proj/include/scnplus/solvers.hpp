#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "scnplus/types.hpp"

namespace scnplus {

/// Hyperparameters of the privileged-information objective: C scales the
/// slack correction driven by the privileged hidden outputs, gamma shrinks
/// the privileged output weights. The slack vector multiplying C is the
/// all-ones matrix, so only column sums of the privileged outputs appear.
struct LupiParams {
  double C = 0.1;
  double gamma = 1e5;

  void validate() const {
    if (C < 0.0) throw std::invalid_argument("LupiParams: C must be >= 0");
    if (gamma <= 0.0) throw std::invalid_argument("LupiParams: gamma must be > 0");
  }
};

/// Contraction-rate offset: mu_L = (1 - r) / (L + 1), node index L >= 1.
/// Strictly positive, at most (1 - r), and vanishing as L grows.
inline double mu_schedule(double r, int node_index) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("mu_schedule: r must be in (0,1)");
  if (node_index < 1) throw std::invalid_argument("mu_schedule: node index must be >= 1");
  return (1.0 - r) / static_cast<double>(node_index + 1);
}

/// Scalar acceptance threshold delta_L = (1 - r - mu_L) * ||e||_F^2.
inline double delta_threshold(const Matrix& e_prev, double r, double mu) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("delta_threshold: r must be in (0,1)");
  if (mu < 0.0 || mu > 1.0 - r)
    throw std::invalid_argument("delta_threshold: mu must be in [0, 1-r]");
  return (1.0 - r - mu) * e_prev.squaredNorm();
}

/// Output weight of a new node without privileged information: the exact
/// one-dimensional projection beta_q = <e_q, h> / <h, h> per output
/// dimension. Leaves the updated residual orthogonal to h.
inline RowVector scn_beta(const Matrix& e_prev, const Vector& h) {
  if (e_prev.rows() != h.size()) throw DataError("scn_beta: residual/output length mismatch");
  const double sq = h.squaredNorm();
  if (sq <= 0.0) throw std::invalid_argument("scn_beta: zero-norm hidden output");
  return (h.transpose() * e_prev) / sq;
}

/// Output weight rows for one node under the privileged objective.
struct LupiWeights {
  RowVector beta;        // 1 x m, normal half
  RowVector beta_tilde;  // 1 x m, privileged half
};

/// The reformulated 2x2 building blocks: A = diag(1, gamma),
/// B = diag(0, C), and the stacked hidden outputs [h, h_tilde].
struct JointBlocks {
  Eigen::Matrix2d A;
  Eigen::Matrix2d B;
  Matrix delta_h;  // N x 2
};

inline JointBlocks make_joint_blocks(const Vector& h, const Vector& h_tilde,
                                     const LupiParams& params) {
  JointBlocks blocks;
  blocks.A << 1.0, 0.0, 0.0, params.gamma;
  blocks.B << 0.0, 0.0, 0.0, params.C;
  blocks.delta_h.resize(h.size(), 2);
  blocks.delta_h.col(0) = h;
  blocks.delta_h.col(1) = h_tilde;
  return blocks;
}

namespace detail {
// Relative guard against near-collinear (h, h_tilde) blowing up the
// closed-form denominator.
inline constexpr double kDenominatorGuard = 1e-12;
}  // namespace detail

/// Closed-form output weights for one node with privileged information.
/// Solves, per output dimension q, the stationarity system
///
///   (1 + h'h)   beta_q  +  (h'ht)      btil_q  =  h'e_q
///   (h'ht)      beta_q  +  (gamma+ht'ht) btil_q = ht'e_q - C * sum(ht)
///
/// by the explicit two-variable elimination. Returns nullopt when the
/// denominator is degenerate relative to its scale; the caller discards
/// such a candidate.
inline std::optional<LupiWeights> lupi_beta(const Matrix& e_prev, const Vector& h,
                                            const Vector& h_tilde,
                                            const LupiParams& params) {
  params.validate();
  if (e_prev.rows() != h.size() || h_tilde.size() != h.size())
    throw DataError("lupi_beta: shape mismatch");

  const double s_h = h.squaredNorm();
  const double s_t = h_tilde.squaredNorm();
  const double s_c = h.dot(h_tilde);
  const double ones_t = h_tilde.sum();  // ht' * l per output dimension

  const double denom = (1.0 + s_h) * (params.gamma + s_t) - s_c * s_c;
  if (std::abs(denom) <=
      detail::kDenominatorGuard * (1.0 + s_h) * (params.gamma + s_t)) {
    return std::nullopt;
  }

  const RowVector a = h.transpose() * e_prev;        // h'e, 1 x m
  const RowVector at = h_tilde.transpose() * e_prev; // ht'e, 1 x m

  LupiWeights w;
  w.beta = ((params.gamma + s_t) * a - s_c * at + (params.C * s_c * ones_t) * RowVector::Ones(a.size())) / denom;
  w.beta_tilde = ((1.0 + s_h) * (at - (params.C * ones_t) * RowVector::Ones(a.size())) - s_c * a) / denom;
  return w;
}

/// Independent route to the same weights: assembles the regularized 2x2
/// system (A + dH'dH) and solves it with a complete orthogonal
/// decomposition (Moore-Penrose behaviour on rank deficiency). Returns the
/// stacked 2 x m matrix [beta; beta_tilde]. Serves as the oracle for
/// lupi_beta.
inline Matrix joint_solve(const Matrix& e_prev, const Vector& h,
                          const Vector& h_tilde, const LupiParams& params) {
  if (e_prev.rows() != h.size() || h_tilde.size() != h.size())
    throw DataError("joint_solve: shape mismatch");
  const JointBlocks blocks = make_joint_blocks(h, h_tilde, params);

  const Eigen::Matrix2d m = blocks.A + blocks.delta_h.transpose() * blocks.delta_h;
  const Matrix rhs = blocks.delta_h.transpose() * e_prev -
                     blocks.B * (blocks.delta_h.transpose() *
                                 Matrix::Ones(e_prev.rows(), e_prev.cols()));
  return m.completeOrthogonalDecomposition().solve(rhs);
}

/// Supervisory score for a plain SCN candidate, per output dimension:
///   xi_q = <e_q, h>^2 / <h, h>  -  (1 - r - mu) * ||e_q||^2.
/// The candidate is admissible iff min_q xi_q >= 0.
inline RowVector xi_scn(const Matrix& e_prev, const Vector& h, double r, double mu) {
  if (e_prev.rows() != h.size()) throw DataError("xi_scn: shape mismatch");
  const double sq = h.squaredNorm();
  if (sq <= 0.0) throw std::invalid_argument("xi_scn: zero-norm hidden output");
  const double slack = 1.0 - r - mu;
  const RowVector proj = h.transpose() * e_prev;
  RowVector xi(e_prev.cols());
  for (Eigen::Index q = 0; q < e_prev.cols(); ++q)
    xi[q] = proj[q] * proj[q] / sq - slack * e_prev.col(q).squaredNorm();
  return xi;
}

/// Supervisory score for an SCN+ candidate, per output dimension:
///   xi_q = <e_q, h*beta_q + ht*btil_q> - (1 - r - mu) * ||e_q||^2,
/// with the weights already evaluated by lupi_beta for this candidate.
/// Sum over q is the pool-selection score.
inline RowVector xi_scn_plus(const Matrix& e_prev, const Vector& h,
                             const Vector& h_tilde, const RowVector& beta,
                             const RowVector& beta_tilde, double r, double mu) {
  if (e_prev.rows() != h.size() || h_tilde.size() != h.size())
    throw DataError("xi_scn_plus: shape mismatch");
  if (beta.size() != e_prev.cols() || beta_tilde.size() != e_prev.cols())
    throw DataError("xi_scn_plus: weight width mismatch");
  const double slack = 1.0 - r - mu;
  RowVector xi(e_prev.cols());
  for (Eigen::Index q = 0; q < e_prev.cols(); ++q) {
    const Vector contrib = h * beta[q] + h_tilde * beta_tilde[q];
    xi[q] = e_prev.col(q).dot(contrib) - slack * e_prev.col(q).squaredNorm();
  }
  return xi;
}

/// Snapshot of the supervisory quantities for one candidate evaluation.
struct SupervisionState {
  double r = 0.0;
  double mu = 0.0;
  double delta = 0.0;
  RowVector xi_per_dim;
  double xi_total = 0.0;

  bool admissible() const { return xi_per_dim.size() > 0 && xi_per_dim.minCoeff() >= 0.0; }
};

inline SupervisionState supervise_scn(const Matrix& e_prev, const Vector& h,
                                      double r, double mu) {
  SupervisionState s;
  s.r = r;
  s.mu = mu;
  s.delta = delta_threshold(e_prev, r, mu);
  s.xi_per_dim = xi_scn(e_prev, h, r, mu);
  s.xi_total = s.xi_per_dim.sum();
  return s;
}

inline SupervisionState supervise_scn_plus(const Matrix& e_prev, const Vector& h,
                                           const Vector& h_tilde,
                                           const LupiWeights& w, double r,
                                           double mu) {
  SupervisionState s;
  s.r = r;
  s.mu = mu;
  s.delta = delta_threshold(e_prev, r, mu);
  s.xi_per_dim = xi_scn_plus(e_prev, h, h_tilde, w.beta, w.beta_tilde, r, mu);
  s.xi_total = s.xi_per_dim.sum();
  return s;
}

}  // namespace scnplus
