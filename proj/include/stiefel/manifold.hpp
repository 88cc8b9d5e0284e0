#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "stiefel/errors.hpp"
#include "stiefel/linalg.hpp"

namespace stiefel {

using Eigen::MatrixXd;

// Point on St(n,p): an n x p matrix with orthonormal columns,
// ||U^T U - I||_F <= tol_scale * p.
class StiefelPoint {
 public:
  static constexpr double kOrthTolScale = 1e-11;

  explicit StiefelPoint(MatrixXd entries, double tol_scale = kOrthTolScale);

  // Re-orthonormalizes with one QR pass; for ingestion from external files.
  static StiefelPoint from_nonorthonormal(const MatrixXd& entries);

  // Skips validation for values orthonormal by construction.
  static StiefelPoint trusted(MatrixXd entries);

  Eigen::Index n() const { return entries_.rows(); }
  Eigen::Index p() const { return entries_.cols(); }
  const MatrixXd& matrix() const { return entries_; }

  bool same_point(const StiefelPoint& other) const;

 private:
  struct trusted_tag {};
  StiefelPoint(MatrixXd entries, trusted_tag) : entries_(std::move(entries)) {}

  MatrixXd entries_;
};

// Metric parameter alpha != -1 with the derived coefficients
// mu = alpha/(alpha+1) and nu = (2 alpha + 1)/(alpha + 1) = mu + 1.
// alpha = 0 is the canonical metric, alpha = -1/2 the Euclidean one.
// alpha < -1 gives a pseudo-Riemannian metric; construction succeeds but the
// norm/scaling operations and the log solvers refuse it.
class AlphaMetric {
 public:
  explicit AlphaMetric(double alpha);

  static AlphaMetric canonical() { return AlphaMetric(0.0); }
  static AlphaMetric euclidean() { return AlphaMetric(-0.5); }

  double alpha() const { return alpha_; }
  double mu() const { return alpha_ / (alpha_ + 1.0); }
  double nu() const { return (2.0 * alpha_ + 1.0) / (alpha_ + 1.0); }
  bool is_riemannian() const { return alpha_ > -1.0; }
  bool is_canonical() const { return alpha_ == 0.0; }
  bool is_euclidean() const { return alpha_ == -0.5; }

 private:
  double alpha_;
};

// Tangent vector at a base point: U^T Delta skew-symmetric within tol.
class TangentVector {
 public:
  static constexpr double kSkewTol = 1e-11;

  TangentVector(StiefelPoint base, MatrixXd entries, double tol = kSkewTol);

  static TangentVector trusted(StiefelPoint base, MatrixXd entries);
  static TangentVector zero(const StiefelPoint& base);

  const StiefelPoint& base() const { return base_; }
  const MatrixXd& matrix() const { return entries_; }

 private:
  struct trusted_tag {};
  TangentVector(StiefelPoint base, MatrixXd entries, trusted_tag)
      : base_(std::move(base)), entries_(std::move(entries)) {}

  StiefelPoint base_;
  MatrixXd entries_;
};

// Orthonormal frame Q for the normal component of X at U, with Q^T U = 0 and
// Q B = (I - U U^T) X. Rank-deficient input keeps the [B_r; 0] layout of
// compact_qr; the trailing columns of Q are completed deterministically so
// they stay orthogonal to U.
struct NormalSplit {
  StiefelPoint q_frame;
  MatrixXd b;
  Eigen::Index rank;
};

NormalSplit split_normal(const StiefelPoint& u, const MatrixXd& x);

// Reduced representation Delta = U A + Q B with A = U^T Delta skew.
struct PFactors {
  linalg::SkewMatrix a;
  MatrixXd b;
  StiefelPoint q_frame;
  Eigen::Index rank;
};

PFactors pfactors(const StiefelPoint& u, const TangentVector& delta);
TangentVector assemble_tangent(const StiefelPoint& u, const MatrixXd& a,
                               const MatrixXd& b, const StiefelPoint& q);

// Pi_U(W) = W - U sym(U^T W), the metric-independent projection onto T_U.
TangentVector project_tangent(const StiefelPoint& u, const MatrixXd& w);

// <D1, D2>_alpha = tr(D1^T (I - (2a+1)/(2(a+1)) U U^T) D2)
//                = 1/(2(a+1)) tr(A1^T A2) + tr(H1^T H2).
double inner_alpha(const AlphaMetric& metric, const TangentVector& d1,
                   const TangentVector& d2);
double norm_alpha(const AlphaMetric& metric, const TangentVector& d);

// QR orthonormalization of an n x p matrix with entries uniform on [0,1).
StiefelPoint random_point(Eigen::Index n, Eigen::Index p, std::uint64_t seed);

// Delta = U skew(G) + (I - U U^T) T with G, T uniform on [0,1), scaled so
// that norm_alpha(Delta) = length.
TangentVector random_tangent(const StiefelPoint& u, std::uint64_t seed,
                             const AlphaMetric& metric, double length);

}  // namespace stiefel
