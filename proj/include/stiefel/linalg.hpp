#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "stiefel/errors.hpp"

namespace stiefel::linalg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd sym_part(const MatrixXd& m);   // (M + M^T)/2
MatrixXd skew_part(const MatrixXd& m);  // (M - M^T)/2

// Largest singular value. Computed from the Gram matrix, which is accurate
// for the dominant singular value at the sizes used here.
double spectral_norm(const MatrixXd& m);

// Real skew-symmetric d x d matrix. Skew-symmetry is enforced on ingest:
// entries are replaced by the skew part and the diagonal is set to zero.
class SkewMatrix {
 public:
  explicit SkewMatrix(const MatrixXd& m);
  static SkewMatrix Zero(Eigen::Index dim);

  Eigen::Index dim() const { return entries_.rows(); }
  const MatrixXd& matrix() const { return entries_; }

 private:
  MatrixXd entries_;
};

// Real d x d matrix V with V^T V = I (residual <= tol_scale * d in the
// Frobenius norm) and det(V) = +1.
class SpecialOrthogonalMatrix {
 public:
  static constexpr double kOrthTolScale = 1e-12;

  explicit SpecialOrthogonalMatrix(MatrixXd m, double tol_scale = kOrthTolScale);

  // Skips validation; for values whose orthogonality holds by construction
  // (products of orthogonal factors, Schur-assembled rotations).
  static SpecialOrthogonalMatrix trusted(MatrixXd m);

  Eigen::Index dim() const { return entries_.rows(); }
  const MatrixXd& matrix() const { return entries_; }

 private:
  struct trusted_tag {};
  SpecialOrthogonalMatrix(MatrixXd m, trusted_tag) : entries_(std::move(m)) {}

  MatrixXd entries_;
};

// Real Schur form of a special orthogonal matrix: V = Q * D * Q^T with Q
// orthogonal and D block diagonal, blocks either a 1x1 entry (+-1) or a 2x2
// plane rotation by angle phi.
struct SchurBlock {
  enum class Kind { Scalar, Rotation };
  Kind kind;
  Eigen::Index offset;  // position along the diagonal
  double value = 0.0;   // Scalar: the +-1 entry
  double angle = 0.0;   // Rotation: phi in (-pi, pi]

  Eigen::Index size() const { return kind == Kind::Rotation ? 2 : 1; }
};

struct SchurForm {
  MatrixXd orthogonal_factor;
  std::vector<SchurBlock> blocks;

  MatrixXd quasi_diagonal() const;
  MatrixXd reassemble() const;  // orthogonal_factor * quasi_diagonal * factor^T
};

SchurForm schur_rotation_form(const SpecialOrthogonalMatrix& v);

// exp_m restricted to skew input, evaluated through the real Schur form.
SpecialOrthogonalMatrix expm_skew(const SkewMatrix& s);

// Principal matrix logarithm of a special orthogonal matrix (Schur route).
// Throws AnglePiError when a rotation angle is within angle_tol of +-pi or
// when -1 eigenvalues pair into a pi-rotation; an odd count of -1 eigenvalues
// means det(V) = -1 and raises NotSpecialOrthogonalError.
SkewMatrix logm_so(const SpecialOrthogonalMatrix& v, double angle_tol = 1e-8);

// Compact QR factorization A = Q R with Q in R^{n x p} column-orthonormal and
// R in R^{p x p}. Rank-deficient input (diagonal-of-R threshold
// rank_tol_scale * ||A||_F) is arranged so the trailing p-rank rows of R
// vanish; the trailing columns of Q are then an arbitrary orthonormal
// extension. R is not triangular in general.
struct CompactQR {
  MatrixXd q;
  MatrixXd r;
  Eigen::Index rank;
};

CompactQR compact_qr(const MatrixXd& a, double rank_tol_scale = 1e-12);

// Given [M; N] in R^{2p x p} with orthonormal columns, blocks X0, Y0 such
// that [[M, X0], [N, Y0]] is in SO(2p). When N = [N_r; 0] the completion
// keeps the block structure [[*, 0], [0, I]]; the determinant sign is fixed
// by flipping the last non-identity completion column.
struct Completion {
  MatrixXd x0;
  MatrixXd y0;
};

Completion orthonormal_completion(const MatrixXd& m, const MatrixXd& n);

// Solves C = S*Gamma + Gamma*S for Gamma with S symmetric negative definite
// and C skew; the solution is skew. Eigendecompose S = Q L Q^T and divide by
// l_i + l_j in the eigenbasis.
SkewMatrix solve_sym_sylvester(const MatrixXd& s, const SkewMatrix& c);

// exp_m(S) together with the Frechet derivative D(exp_m)_S(H), from the block
// identity exp([[S, H], [0, S]]) = [[exp(S), D exp_S(H)], [0, exp(S)]].
struct FrechetPair {
  MatrixXd value;
  MatrixXd derivative;
};

FrechetPair frechet_expm(const MatrixXd& s, const MatrixXd& h);

// log_m(V) and D(log_m)_V(W) through the same block identity.
FrechetPair frechet_logm(const MatrixXd& v, const MatrixXd& w);

// Cay(S) = (I - S/2)^{-1} (I + S/2) and relatives.
SpecialOrthogonalMatrix cayley(const SkewMatrix& s);
SkewMatrix cayley_inv(const MatrixXd& v);
FrechetPair frechet_cayley(const SkewMatrix& s, const MatrixXd& h);
FrechetPair frechet_cayley_inv(const MatrixXd& v, const MatrixXd& w);

// General dense matrix exponential/logarithm (scaling-and-squaring /
// inverse-scaling-and-squaring with Pade core). Oracle-grade helpers for
// non-skew arguments.
MatrixXd expm_dense(const MatrixXd& a);
MatrixXd logm_dense(const MatrixXd& a);

// Unrestarted matrix-free GMRES. Stops when ||L(x) - b|| <= tol * ||b||;
// throws NoConvergenceError (carrying the residual history) when max_iter is
// exhausted first. The operator is only ever evaluated through apply_op.
struct GmresResult {
  VectorXd x;
  std::vector<double> residual_history;
  int iterations = 0;
};

using LinearOperator = std::function<VectorXd(const VectorXd&)>;

GmresResult gmres_solve(const LinearOperator& apply_op, const VectorXd& b,
                        double tol, int max_iter);

namespace detail {

// Real Schur data of a skew-symmetric matrix: S = Q * blkdiag(...) * Q^T with
// 2x2 blocks [[0, -theta], [theta, 0]]. exp(t*S) is then a cheap reassembly,
// shared across evaluation times t.
struct SkewSchur {
  MatrixXd q;
  std::vector<std::pair<Eigen::Index, double>> rotations;  // (offset, theta)
  Eigen::Index dim = 0;

  MatrixXd exp_scaled(double t) const;
};

SkewSchur skew_schur(const MatrixXd& s);

MatrixXd expm_skew_raw(const MatrixXd& s);
MatrixXd logm_so_raw(const MatrixXd& v, double angle_tol);
SchurForm schur_rotation_form_raw(const MatrixXd& v);

}  // namespace detail

}  // namespace stiefel::linalg
