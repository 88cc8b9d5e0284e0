#include "stiefel/manifold.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace stiefel {

namespace {

MatrixXd uniform_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)       // column-major fill order
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = unit(rng);
  return m;
}

}  // namespace

StiefelPoint::StiefelPoint(MatrixXd entries, double tol_scale)
    : entries_(std::move(entries)) {
  const Eigen::Index n = entries_.rows(), p = entries_.cols();
  if (p > n) {
    std::ostringstream os;
    os << "StiefelPoint: need p <= n, got " << n << "x" << p;
    throw DimensionError(os.str());
  }
  if (p < 1) throw DimensionError("StiefelPoint: need p >= 1");
  const double residual =
      (entries_.transpose() * entries_ - MatrixXd::Identity(p, p)).norm();
  if (residual > tol_scale * static_cast<double>(p)) {
    std::ostringstream os;
    os << "StiefelPoint: orthonormality residual " << residual << " exceeds "
       << tol_scale * static_cast<double>(p);
    throw NotOrthonormalError(os.str());
  }
}

StiefelPoint StiefelPoint::from_nonorthonormal(const MatrixXd& entries) {
  if (entries.cols() > entries.rows() || entries.cols() < 1)
    throw DimensionError("StiefelPoint: need n >= p >= 1");
  Eigen::HouseholderQR<MatrixXd> qr(entries);
  MatrixXd q = qr.householderQ() *
               MatrixXd::Identity(entries.rows(), entries.cols());
  return StiefelPoint(std::move(q), trusted_tag{});
}

StiefelPoint StiefelPoint::trusted(MatrixXd entries) {
  return StiefelPoint(std::move(entries), trusted_tag{});
}

bool StiefelPoint::same_point(const StiefelPoint& other) const {
  return entries_.rows() == other.entries_.rows() &&
         entries_.cols() == other.entries_.cols() &&
         entries_ == other.entries_;
}

AlphaMetric::AlphaMetric(double alpha) : alpha_(alpha) {
  if (std::abs(alpha + 1.0) < 1e-12)
    throw ConfigError("AlphaMetric: alpha = -1 is excluded");
}

TangentVector::TangentVector(StiefelPoint base, MatrixXd entries, double tol)
    : base_(std::move(base)), entries_(std::move(entries)) {
  if (entries_.rows() != base_.n() || entries_.cols() != base_.p())
    throw DimensionError("TangentVector: shape does not match the base point");
  const MatrixXd a = base_.matrix().transpose() * entries_;
  const double sym_residual = linalg::sym_part(a).norm();
  if (sym_residual > tol) {
    std::ostringstream os;
    os << "TangentVector: U^T Delta symmetric part " << sym_residual
       << " exceeds " << tol;
    throw NotOrthonormalError(os.str());
  }
}

TangentVector TangentVector::trusted(StiefelPoint base, MatrixXd entries) {
  return TangentVector(std::move(base), std::move(entries), trusted_tag{});
}

TangentVector TangentVector::zero(const StiefelPoint& base) {
  return TangentVector(base, MatrixXd::Zero(base.n(), base.p()), trusted_tag{});
}

NormalSplit split_normal(const StiefelPoint& u, const MatrixXd& x) {
  if (x.rows() != u.n() || x.cols() != u.p())
    throw DimensionError("split_normal: shape does not match the base point");
  const MatrixXd& um = u.matrix();
  const Eigen::Index n = u.n(), p = u.p();
  MatrixXd y = x - um * (um.transpose() * x);
  auto qr = linalg::compact_qr(y);
  MatrixXd q = std::move(qr.q);
  if (qr.rank < p) {
    // complete the trailing columns against [U | Q_r] so the whole frame
    // stays orthogonal to U; deterministic fallback on canonical vectors
    for (Eigen::Index j = qr.rank; j < p; ++j) {
      Eigen::VectorXd v = q.col(j);
      for (int pass = 0; pass < 2; ++pass) {
        v -= um * (um.transpose() * v);
        if (j > 0) v -= q.leftCols(j) * (q.leftCols(j).transpose() * v);
      }
      if (v.norm() < 0.5) {
        for (Eigen::Index k = 0; k < n && v.norm() < 0.1; ++k) {
          v = Eigen::VectorXd::Unit(n, k);
          for (int pass = 0; pass < 2; ++pass) {
            v -= um * (um.transpose() * v);
            if (j > 0) v -= q.leftCols(j) * (q.leftCols(j).transpose() * v);
          }
        }
      }
      if (v.norm() < 0.1) {
        // no room orthogonal to U (n - p < p); these columns multiply zero
        // rows of B, so only orthonormality of Q itself matters
        for (Eigen::Index k = 0; k < n && v.norm() < 0.1; ++k) {
          v = Eigen::VectorXd::Unit(n, k);
          if (j > 0) v -= q.leftCols(j) * (q.leftCols(j).transpose() * v);
        }
      }
      q.col(j) = v / v.norm();
    }
  }
  return {StiefelPoint::trusted(std::move(q)), std::move(qr.r), qr.rank};
}

PFactors pfactors(const StiefelPoint& u, const TangentVector& delta) {
  if (!u.same_point(delta.base()))
    throw BaseMismatchError("pfactors: tangent vector lives at another base");
  NormalSplit split = split_normal(u, delta.matrix());
  linalg::SkewMatrix a(u.matrix().transpose() * delta.matrix());
  return {std::move(a), std::move(split.b), std::move(split.q_frame), split.rank};
}

TangentVector assemble_tangent(const StiefelPoint& u, const MatrixXd& a,
                               const MatrixXd& b, const StiefelPoint& q) {
  return TangentVector(u, u.matrix() * a + q.matrix() * b);
}

TangentVector project_tangent(const StiefelPoint& u, const MatrixXd& w) {
  if (w.rows() != u.n() || w.cols() != u.p())
    throw DimensionError("project_tangent: shape does not match the base point");
  const MatrixXd& um = u.matrix();
  MatrixXd projected = w - um * linalg::sym_part(um.transpose() * w);
  return TangentVector::trusted(u, std::move(projected));
}

double inner_alpha(const AlphaMetric& metric, const TangentVector& d1,
                   const TangentVector& d2) {
  if (!d1.base().same_point(d2.base()))
    throw BaseMismatchError("inner_alpha: tangent vectors at different bases");
  const MatrixXd& um = d1.base().matrix();
  const MatrixXd a1 = um.transpose() * d1.matrix();
  const MatrixXd a2 = um.transpose() * d2.matrix();
  const double ambient = (d1.matrix().transpose() * d2.matrix()).trace();
  const double a_inner = (a1.transpose() * a2).trace();
  // tr(D1^T D2) - nu/2 tr(A1^T A2) = 1/(2(a+1)) tr(A1^T A2) + tr(H1^T H2)
  return ambient - 0.5 * metric.nu() * a_inner;
}

double norm_alpha(const AlphaMetric& metric, const TangentVector& d) {
  if (!metric.is_riemannian())
    throw ConfigError("norm_alpha: metric is not Riemannian (alpha <= -1)");
  const double sq = inner_alpha(metric, d, d);
  return std::sqrt(std::max(0.0, sq));
}

StiefelPoint random_point(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  if (p > n || p < 1) throw DimensionError("random_point: need n >= p >= 1");
  std::mt19937_64 rng(seed);
  const MatrixXd g = uniform_matrix(n, p, rng);
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(n, p);
  return StiefelPoint::trusted(std::move(q));
}

TangentVector random_tangent(const StiefelPoint& u, std::uint64_t seed,
                             const AlphaMetric& metric, double length) {
  if (length < 0.0) throw ConfigError("random_tangent: length must be >= 0");
  if (!metric.is_riemannian())
    throw ConfigError("random_tangent: metric is not Riemannian (alpha <= -1)");
  if (length == 0.0) return TangentVector::zero(u);
  std::mt19937_64 rng(seed);
  const Eigen::Index n = u.n(), p = u.p();
  const MatrixXd g = uniform_matrix(p, p, rng);
  const MatrixXd t = uniform_matrix(n, p, rng);
  const MatrixXd& um = u.matrix();
  MatrixXd raw = um * linalg::skew_part(g) + (t - um * (um.transpose() * t));
  TangentVector direction = TangentVector::trusted(u, std::move(raw));
  const double norm = norm_alpha(metric, direction);
  if (norm < 1e-14)
    throw ZeroTangentError("random_tangent: drawn direction is numerically zero");
  return TangentVector::trusted(u, (length / norm) * direction.matrix());
}

}  // namespace stiefel
