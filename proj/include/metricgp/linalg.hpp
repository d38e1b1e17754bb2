#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "metricgp/config.hpp"
#include "metricgp/errors.hpp"

namespace metricgp {

// Eigendecomposition A = W diag(lambda) W^T with eigenvalues sorted
// descending; eigenvalues below tau_zero * max(1, ||A||) are snapped to 0.
struct sym_eig_result {
  Eigen::MatrixXd W;
  Eigen::VectorXd lambda;

  Eigen::MatrixXd reconstruct() const { return W * lambda.asDiagonal() * W.transpose(); }
};

inline void require_symmetric(const Eigen::MatrixXd& A, double tau_sym, const char* who) {
  if (A.rows() != A.cols()) throw validation_error("non-square", std::string(who) + ": matrix is not square");
  const double scale = 1.0 + A.cwiseAbs().maxCoeff();
  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (asym > tau_sym * scale)
    throw validation_error("non-symmetric",
                           std::string(who) + ": matrix asymmetry " + std::to_string(asym) + " exceeds tolerance");
}

inline sym_eig_result sym_eig(const Eigen::MatrixXd& A, const numeric_config& cfg = default_config()) {
  require_symmetric(A, cfg.tau_sym, "sym_eig");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (A + A.transpose()));
  if (solver.info() != Eigen::Success) throw numeric_error("sym_eig: eigensolver did not converge");
  const int n = static_cast<int>(A.rows());
  sym_eig_result out;
  out.W.resize(n, n);
  out.lambda.resize(n);
  // Eigen returns ascending order; flip to descending.
  for (int i = 0; i < n; ++i) {
    out.lambda(i) = solver.eigenvalues()(n - 1 - i);
    out.W.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  const double norm = std::max(1.0, out.lambda.cwiseAbs().maxCoeff());
  for (int i = 0; i < n; ++i)
    if (std::abs(out.lambda(i)) < cfg.tau_zero * norm) out.lambda(i) = 0.0;
  return out;
}

// Moore-Penrose inverse of a symmetric matrix via zero-snapped
// eigendecomposition.
inline Eigen::MatrixXd pinv(const Eigen::MatrixXd& A, const numeric_config& cfg = default_config()) {
  const auto eig = sym_eig(A, cfg);
  Eigen::VectorXd inv = eig.lambda;
  for (int i = 0; i < inv.size(); ++i) inv(i) = inv(i) != 0.0 ? 1.0 / inv(i) : 0.0;
  return eig.W * inv.asDiagonal() * eig.W.transpose();
}

struct quasi_laplacian_report {
  bool is_symmetric = false;
  bool is_psd = false;
  bool null_dim_is_one = false;
  bool null_vector_is_ones = false;
  double min_eig = 0.0;

  bool is_quasi_laplacian() const {
    return is_symmetric && is_psd && null_dim_is_one && null_vector_is_ones;
  }
};

inline quasi_laplacian_report check_quasi_laplacian(const Eigen::MatrixXd& A,
                                                    const numeric_config& cfg = default_config()) {
  quasi_laplacian_report r;
  if (A.rows() != A.cols()) return r;
  const double scale = 1.0 + A.cwiseAbs().maxCoeff();
  r.is_symmetric = (A - A.transpose()).cwiseAbs().maxCoeff() <= cfg.tau_sym * scale;
  if (!r.is_symmetric) return r;
  const auto eig = sym_eig(A, cfg);
  r.min_eig = eig.lambda(eig.lambda.size() - 1);
  r.is_psd = r.min_eig >= 0.0; // after zero-snapping
  int zeros = 0;
  for (int i = 0; i < eig.lambda.size(); ++i)
    if (eig.lambda(i) == 0.0) ++zeros;
  r.null_dim_is_one = zeros == 1;
  const int n = static_cast<int>(A.rows());
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  r.null_vector_is_ones = r.null_dim_is_one && (A * ones).cwiseAbs().maxCoeff() <= cfg.tau_psd * scale;
  return r;
}

// Block pattern I_p (x) A + (1_{pxp} - I_p) (x) B.
inline Eigen::MatrixXd mp_block(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, int p) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw validation_error("size-mismatch", "mp_block: A and B must have the same size");
  if (p < 1) throw validation_error("bad-p", "mp_block: p must be >= 1");
  const int n = static_cast<int>(A.rows());
  Eigen::MatrixXd M(n * p, n * p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) M.block(i * n, j * n, n, n) = (i == j) ? A : B;
  return M;
}

// Scalar version: p x p matrix with `a` on the diagonal, `b` elsewhere.
inline Eigen::MatrixXd mp_block_scalar(double a, double b, int p) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Constant(p, p, b);
  M.diagonal().setConstant(a);
  return M;
}

} // namespace metricgp
