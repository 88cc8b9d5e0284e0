#include "stiefel/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace stiefel::linalg {

namespace {

void require_square(const MatrixXd& m, const char* who) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << who << ": expected a square matrix, got " << m.rows() << "x" << m.cols();
    throw DimensionError(os.str());
  }
}

void require_same_dim(const MatrixXd& a, const MatrixXd& b, const char* who) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << who << ": shape mismatch, " << a.rows() << "x" << a.cols() << " vs "
       << b.rows() << "x" << b.cols();
    throw DimensionError(os.str());
  }
}

}  // namespace

MatrixXd sym_part(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

MatrixXd skew_part(const MatrixXd& m) { return 0.5 * (m - m.transpose()); }

double spectral_norm(const MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  MatrixXd gram;
  if (m.rows() <= m.cols())
    gram.noalias() = m * m.transpose();
  else
    gram.noalias() = m.transpose() * m;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

SkewMatrix::SkewMatrix(const MatrixXd& m) {
  require_square(m, "SkewMatrix");
  entries_ = 0.5 * (m - m.transpose());
  entries_.diagonal().setZero();
}

SkewMatrix SkewMatrix::Zero(Eigen::Index dim) {
  return SkewMatrix(MatrixXd::Zero(dim, dim));
}

SpecialOrthogonalMatrix::SpecialOrthogonalMatrix(MatrixXd m, double tol_scale)
    : entries_(std::move(m)) {
  require_square(entries_, "SpecialOrthogonalMatrix");
  const Eigen::Index d = entries_.rows();
  const double residual =
      (entries_.transpose() * entries_ - MatrixXd::Identity(d, d)).norm();
  if (residual > tol_scale * static_cast<double>(d)) {
    std::ostringstream os;
    os << "SpecialOrthogonalMatrix: orthogonality residual " << residual
       << " exceeds " << tol_scale * static_cast<double>(d);
    throw NotOrthonormalError(os.str());
  }
  if (Eigen::PartialPivLU<MatrixXd>(entries_).determinant() < 0.0) {
    throw NotSpecialOrthogonalError("SpecialOrthogonalMatrix: determinant is -1");
  }
}

SpecialOrthogonalMatrix SpecialOrthogonalMatrix::trusted(MatrixXd m) {
  return SpecialOrthogonalMatrix(std::move(m), trusted_tag{});
}

MatrixXd SchurForm::quasi_diagonal() const {
  Eigen::Index d = 0;
  for (const auto& b : blocks) d += b.size();
  MatrixXd out = MatrixXd::Zero(d, d);
  for (const auto& b : blocks) {
    if (b.kind == SchurBlock::Kind::Scalar) {
      out(b.offset, b.offset) = b.value;
    } else {
      const double c = std::cos(b.angle), s = std::sin(b.angle);
      out(b.offset, b.offset) = c;
      out(b.offset, b.offset + 1) = -s;
      out(b.offset + 1, b.offset) = s;
      out(b.offset + 1, b.offset + 1) = c;
    }
  }
  return out;
}

MatrixXd SchurForm::reassemble() const {
  return orthogonal_factor * quasi_diagonal() * orthogonal_factor.transpose();
}

namespace detail {

SkewSchur skew_schur(const MatrixXd& s) {
  SkewSchur out;
  out.dim = s.rows();
  if (out.dim == 0) {
    out.q.resize(0, 0);
    return out;
  }
  if (out.dim == 1) {
    out.q = MatrixXd::Identity(1, 1);
    return out;
  }
  Eigen::RealSchur<MatrixXd> schur(s);
  if (schur.info() != Eigen::Success)
    throw Error("skew_schur: real Schur iteration failed to converge");
  const MatrixXd& t = schur.matrixT();
  out.q = schur.matrixU();
  Eigen::Index i = 0;
  while (i < out.dim) {
    if (i + 1 < out.dim && t(i + 1, i) != 0.0) {
      // block is [[0, -theta], [theta, 0]] up to roundoff on the diagonal
      out.rotations.emplace_back(i, 0.5 * (t(i + 1, i) - t(i, i + 1)));
      i += 2;
    } else {
      ++i;
    }
  }
  return out;
}

MatrixXd SkewSchur::exp_scaled(double t) const {
  MatrixXd core = MatrixXd::Identity(dim, dim);
  for (const auto& [off, theta] : rotations) {
    const double c = std::cos(t * theta), s = std::sin(t * theta);
    core(off, off) = c;
    core(off, off + 1) = -s;
    core(off + 1, off) = s;
    core(off + 1, off + 1) = c;
  }
  return q * core * q.transpose();
}

MatrixXd expm_skew_raw(const MatrixXd& s) { return skew_schur(s).exp_scaled(1.0); }

SchurForm schur_rotation_form_raw(const MatrixXd& v) {
  const Eigen::Index d = v.rows();
  SchurForm out;
  if (d == 1) {
    out.orthogonal_factor = MatrixXd::Identity(1, 1);
    out.blocks.push_back({SchurBlock::Kind::Scalar, 0, v(0, 0), 0.0});
    return out;
  }
  Eigen::RealSchur<MatrixXd> schur(v);
  if (schur.info() != Eigen::Success)
    throw Error("schur_rotation_form: real Schur iteration failed to converge");
  const MatrixXd& t = schur.matrixT();
  out.orthogonal_factor = schur.matrixU();
  Eigen::Index i = 0;
  while (i < d) {
    if (i + 1 < d && t(i + 1, i) != 0.0) {
      // orthogonal quasi-triangular => the 2x2 block is a plane rotation
      const double c = 0.5 * (t(i, i) + t(i + 1, i + 1));
      out.blocks.push_back(
          {SchurBlock::Kind::Rotation, i, 0.0, std::atan2(t(i + 1, i), c)});
      i += 2;
    } else {
      out.blocks.push_back({SchurBlock::Kind::Scalar, i, t(i, i), 0.0});
      ++i;
    }
  }
  return out;
}

MatrixXd logm_so_raw(const MatrixXd& v, double angle_tol) {
  const SchurForm form = schur_rotation_form_raw(v);
  int negative_ones = 0;
  for (const auto& b : form.blocks) {
    if (b.kind == SchurBlock::Kind::Rotation) {
      if (std::numbers::pi - std::abs(b.angle) <= angle_tol) {
        throw AnglePiError(
            "logm_so: rotation angle within angle_tol of pi, principal "
            "logarithm undefined (input at/beyond the cut locus)");
      }
    } else if (b.value < 0.0) {
      ++negative_ones;
    }
  }
  if (negative_ones % 2 == 1) {
    throw NotSpecialOrthogonalError(
        "logm_so: odd count of -1 eigenvalues, determinant is -1");
  }
  if (negative_ones > 0) {
    throw AnglePiError(
        "logm_so: -1 eigenvalues pair into a pi-rotation block, principal "
        "logarithm undefined (input at/beyond the cut locus)");
  }
  const Eigen::Index d = v.rows();
  MatrixXd core = MatrixXd::Zero(d, d);
  for (const auto& b : form.blocks) {
    if (b.kind == SchurBlock::Kind::Rotation) {
      core(b.offset, b.offset + 1) = -b.angle;
      core(b.offset + 1, b.offset) = b.angle;
    }
  }
  MatrixXd out = form.orthogonal_factor * core * form.orthogonal_factor.transpose();
  out = 0.5 * (out - out.transpose().eval());
  out.diagonal().setZero();
  return out;
}

}  // namespace detail

SchurForm schur_rotation_form(const SpecialOrthogonalMatrix& v) {
  return detail::schur_rotation_form_raw(v.matrix());
}

SpecialOrthogonalMatrix expm_skew(const SkewMatrix& s) {
  return SpecialOrthogonalMatrix::trusted(detail::expm_skew_raw(s.matrix()));
}

SkewMatrix logm_so(const SpecialOrthogonalMatrix& v, double angle_tol) {
  return SkewMatrix(detail::logm_so_raw(v.matrix(), angle_tol));
}

CompactQR compact_qr(const MatrixXd& a, double rank_tol_scale) {
  const Eigen::Index n = a.rows(), p = a.cols();
  if (n < p) {
    std::ostringstream os;
    os << "compact_qr: need n >= p, got " << n << "x" << p;
    throw DimensionError(os.str());
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(a);
  MatrixXd thin_q = qr.householderQ() * MatrixXd::Identity(n, p);
  MatrixXd r_piv = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const double rank_tol = rank_tol_scale * a.norm();
  Eigen::Index rank = 0;
  while (rank < p && std::abs(r_piv(rank, rank)) > rank_tol) ++rank;
  if (rank < p) r_piv.bottomRows(p - rank).setZero();
  // A P = Q R_piv, so A = Q (R_piv P^T); R_piv P^T keeps the [R_r; 0] layout
  MatrixXd r = r_piv * qr.colsPermutation().transpose();
  return {std::move(thin_q), std::move(r), rank};
}

Completion orthonormal_completion(const MatrixXd& m, const MatrixXd& n) {
  require_square(m, "orthonormal_completion");
  require_same_dim(m, n, "orthonormal_completion");
  const Eigen::Index p = m.rows();
  const double residual =
      (m.transpose() * m + n.transpose() * n - MatrixXd::Identity(p, p)).norm();
  if (residual > 1e-10) {
    std::ostringstream os;
    os << "orthonormal_completion: [M; N] is not orthonormal, residual "
       << residual;
    throw NotOrthonormalError(os.str());
  }

  // trailing zero rows of N fix the preserved block structure
  const double row_tol = 1e-12 * std::max(1.0, n.norm());
  Eigen::Index r = p;
  while (r > 0 && n.row(r - 1).norm() <= row_tol) --r;

  MatrixXd x0 = MatrixXd::Zero(p, p);
  MatrixXd y0 = MatrixXd::Zero(p, p);
  y0.bottomRightCorner(p - r, p - r).setIdentity();

  MatrixXd vr(p + r, p + r);
  vr.topLeftCorner(p, p) = m;
  vr.bottomLeftCorner(r, p) = n.topRows(r);
  if (r > 0) {
    MatrixXd block = vr.leftCols(p);
    Eigen::HouseholderQR<MatrixXd> qr(block);
    MatrixXd qfull = qr.householderQ();
    vr.rightCols(r) = qfull.rightCols(r);
  }
  const double det = Eigen::PartialPivLU<MatrixXd>(vr).determinant();
  if (det < 0.0) {
    if (r > 0)
      vr.col(p + r - 1) *= -1.0;
    else
      y0(p - 1, p - 1) = -1.0;
  }
  if (r > 0) {
    x0.leftCols(r) = vr.topRightCorner(p, r);
    y0.topLeftCorner(r, r) = vr.bottomRightCorner(r, r);
  }
  return {std::move(x0), std::move(y0)};
}

SkewMatrix solve_sym_sylvester(const MatrixXd& s, const SkewMatrix& c) {
  require_square(s, "solve_sym_sylvester");
  require_same_dim(s, c.matrix(), "solve_sym_sylvester");
  const Eigen::Index p = s.rows();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym_part(s));
  const VectorXd& lambda = es.eigenvalues();
  if (lambda.maxCoeff() >= -1e-12) {
    std::ostringstream os;
    os << "solve_sym_sylvester: coefficient matrix has eigenvalue "
       << lambda.maxCoeff() << " >= -1e-12";
    throw IndefiniteError(os.str());
  }
  const MatrixXd& q = es.eigenvectors();
  MatrixXd chat = q.transpose() * c.matrix() * q;
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < p; ++i) chat(i, j) /= lambda(i) + lambda(j);
  return SkewMatrix(q * chat * q.transpose());
}

FrechetPair frechet_expm(const MatrixXd& s, const MatrixXd& h) {
  require_square(s, "frechet_expm");
  require_same_dim(s, h, "frechet_expm");
  const Eigen::Index d = s.rows();
  MatrixXd block = MatrixXd::Zero(2 * d, 2 * d);
  block.topLeftCorner(d, d) = s;
  block.topRightCorner(d, d) = h;
  block.bottomRightCorner(d, d) = s;
  const MatrixXd e = block.exp();
  return {e.topLeftCorner(d, d), e.topRightCorner(d, d)};
}

FrechetPair frechet_logm(const MatrixXd& v, const MatrixXd& w) {
  require_square(v, "frechet_logm");
  require_same_dim(v, w, "frechet_logm");
  const Eigen::Index d = v.rows();
  MatrixXd block = MatrixXd::Zero(2 * d, 2 * d);
  block.topLeftCorner(d, d) = v;
  block.topRightCorner(d, d) = w;
  block.bottomRightCorner(d, d) = v;
  const MatrixXd l = block.log();
  return {l.topLeftCorner(d, d), l.topRightCorner(d, d)};
}

SpecialOrthogonalMatrix cayley(const SkewMatrix& s) {
  const Eigen::Index d = s.dim();
  const MatrixXd eye = MatrixXd::Identity(d, d);
  // I - S/2 is invertible for every skew S (eigenvalues 1 -+ i*theta/2)
  MatrixXd v = (eye - 0.5 * s.matrix()).partialPivLu().solve(eye + 0.5 * s.matrix());
  return SpecialOrthogonalMatrix::trusted(std::move(v));
}

SkewMatrix cayley_inv(const MatrixXd& v) {
  require_square(v, "cayley_inv");
  const Eigen::Index d = v.rows();
  const MatrixXd eye = MatrixXd::Identity(d, d);
  const MatrixXd vp = v + eye;
  Eigen::JacobiSVD<MatrixXd> svd(vp);
  if (svd.singularValues().minCoeff() <= 1e-10) {
    throw SingularError("cayley_inv: eigenvalue of V at -1, Cayley inverse undefined");
  }
  // S = 2 (V - I)(V + I)^{-1}, solved via (V + I)^T X^T = 2 (V - I)^T
  MatrixXd st = vp.transpose().partialPivLu().solve(2.0 * (v - eye).transpose());
  return SkewMatrix(st.transpose());
}

FrechetPair frechet_cayley(const SkewMatrix& s, const MatrixXd& h) {
  require_same_dim(s.matrix(), h, "frechet_cayley");
  const Eigen::Index d = s.dim();
  const MatrixXd eye = MatrixXd::Identity(d, d);
  Eigen::PartialPivLU<MatrixXd> lu(eye - 0.5 * s.matrix());
  MatrixXd v = lu.solve(eye + 0.5 * s.matrix());
  // D Cay_S(H) = (I - S/2)^{-1} (H/2) (I + Cay(S))
  MatrixXd deriv = lu.solve(0.5 * h) * (eye + v);
  return {std::move(v), std::move(deriv)};
}

FrechetPair frechet_cayley_inv(const MatrixXd& v, const MatrixXd& w) {
  require_same_dim(v, w, "frechet_cayley_inv");
  const Eigen::Index d = v.rows();
  const MatrixXd eye = MatrixXd::Identity(d, d);
  const SkewMatrix s = cayley_inv(v);
  // D Cay^{-1}_V(W) = (2I - S) W (V + I)^{-1}
  MatrixXd numer = (2.0 * eye - s.matrix()) * w;
  MatrixXd dt = (v + eye).transpose().partialPivLu().solve(numer.transpose());
  return {s.matrix(), dt.transpose()};
}

MatrixXd expm_dense(const MatrixXd& a) { return a.exp(); }

MatrixXd logm_dense(const MatrixXd& a) { return a.log(); }

GmresResult gmres_solve(const LinearOperator& apply_op, const VectorXd& b,
                        double tol, int max_iter) {
  if (!b.allFinite()) throw Error("gmres_solve: right-hand side is not finite");
  if (max_iter < 1) throw ConfigError("gmres_solve: max_iter must be >= 1");
  const Eigen::Index n = b.size();
  const double bnorm = b.norm();

  GmresResult res;
  if (bnorm == 0.0) {
    res.x = VectorXd::Zero(n);
    res.residual_history = {0.0};
    return res;
  }

  const int limit = static_cast<int>(std::min<Eigen::Index>(max_iter, n));
  MatrixXd hess = MatrixXd::Zero(limit + 1, limit);
  std::vector<VectorXd> basis;
  basis.reserve(limit + 1);
  basis.push_back(b / bnorm);
  VectorXd g = VectorXd::Zero(limit + 1);
  g(0) = bnorm;
  std::vector<double> cs(limit), sn(limit);

  auto solve_and_return = [&](int k) {
    // back substitution on the k x k triangle
    VectorXd y(k);
    for (int i = k - 1; i >= 0; --i) {
      double acc = g(i);
      for (int j = i + 1; j < k; ++j) acc -= hess(i, j) * y(j);
      y(i) = acc / hess(i, i);
    }
    res.x = VectorXd::Zero(n);
    for (int i = 0; i < k; ++i) res.x += y(i) * basis[i];
    res.iterations = k;
    return res;
  };

  for (int j = 0; j < limit; ++j) {
    VectorXd w = apply_op(basis[j]);
    if (w.size() != n)
      throw DimensionError("gmres_solve: operator changed the vector dimension");
    for (int i = 0; i <= j; ++i) {
      hess(i, j) = basis[i].dot(w);
      w -= hess(i, j) * basis[i];
    }
    hess(j + 1, j) = w.norm();
    const bool breakdown = hess(j + 1, j) <= 1e-14 * bnorm;
    if (!breakdown) basis.push_back(w / hess(j + 1, j));

    for (int i = 0; i < j; ++i) {
      const double t = cs[i] * hess(i, j) + sn[i] * hess(i + 1, j);
      hess(i + 1, j) = -sn[i] * hess(i, j) + cs[i] * hess(i + 1, j);
      hess(i, j) = t;
    }
    const double denom = std::hypot(hess(j, j), hess(j + 1, j));
    if (denom == 0.0) {  // stagnation (singular operator), cannot eliminate
      res.residual_history.push_back(std::abs(g(j)));
      break;
    }
    cs[j] = hess(j, j) / denom;
    sn[j] = hess(j + 1, j) / denom;
    hess(j, j) = denom;
    hess(j + 1, j) = 0.0;
    g(j + 1) = -sn[j] * g(j);
    g(j) = cs[j] * g(j);

    const double residual = std::abs(g(j + 1));
    res.residual_history.push_back(residual);
    if (residual <= tol * bnorm) return solve_and_return(j + 1);
    if (breakdown) break;  // Krylov space is exhausted below the target
  }
  throw NoConvergenceError("gmres_solve: max_iter exhausted", res.residual_history);
}

}  // namespace stiefel::linalg
