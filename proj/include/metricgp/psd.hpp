#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "metricgp/config.hpp"
#include "metricgp/errors.hpp"
#include "metricgp/linalg.hpp"

namespace metricgp {

struct psd_verdict {
  double min_eig = 0.0;
  bool pass = false;
  double tolerance = 0.0;
  std::optional<Eigen::VectorXd> witness; // attains the minimal Rayleigh quotient
};

inline double default_psd_tol(const Eigen::MatrixXd& A, const numeric_config& cfg = default_config()) {
  return cfg.tau_psd * (1.0 + A.cwiseAbs().maxCoeff());
}

inline psd_verdict psd_check(const Eigen::MatrixXd& A, std::optional<double> tol = std::nullopt,
                             const numeric_config& cfg = default_config()) {
  require_symmetric(A, cfg.tau_sym, "psd_check");
  const double t = tol.value_or(default_psd_tol(A, cfg));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (A + A.transpose()));
  if (solver.info() != Eigen::Success) throw numeric_error("psd_check: eigensolver did not converge");
  psd_verdict v;
  v.min_eig = solver.eigenvalues()(0);
  v.tolerance = t;
  v.pass = v.min_eig >= -t;
  v.witness = solver.eigenvectors().col(0);
  return v;
}

// Orthonormal basis of the hyperplane {c : 1^T c = 0}, built from the
// Householder reflection sending 1/sqrt(n) to e_1.
inline Eigen::MatrixXd ones_orthogonal_basis(int n) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  Eigen::VectorXd u = w - Eigen::VectorXd::Unit(n, 0);
  const double nn = u.squaredNorm();
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
  if (nn > 0.0) H -= (2.0 / nn) * (u * u.transpose());
  return H.rightCols(n - 1);
}

// Conditional negative semidefiniteness: c^T A c <= 0 whenever 1^T c = 0.
// Verdict sign convention: pass iff min eig of -P^T A P >= -tol, and min_eig
// reports that projected value.
inline psd_verdict cnd_check(const Eigen::MatrixXd& A, std::optional<double> tol = std::nullopt,
                             const numeric_config& cfg = default_config()) {
  require_symmetric(A, cfg.tau_sym, "cnd_check");
  const int n = static_cast<int>(A.rows());
  if (n == 1) {
    psd_verdict v;
    v.min_eig = 0.0;
    v.tolerance = tol.value_or(default_psd_tol(A, cfg));
    v.pass = true;
    return v;
  }
  const Eigen::MatrixXd P = ones_orthogonal_basis(n);
  const Eigen::MatrixXd proj = -(P.transpose() * A * P);
  psd_verdict v = psd_check(proj, tol.value_or(default_psd_tol(A, cfg)), cfg);
  if (v.witness) v.witness = (P * (*v.witness)).eval(); // lift back to the constraint plane
  return v;
}

// 1_p-conditional negative semidefiniteness of a matrix-valued map Gamma over
// a point sample: sum_ij c_i^T Gamma(x_i,x_j) c_j <= 0 whenever
// 1_p^T sum_i c_i = 0. Checks the exact projected eigenproblem on the
// assembled block matrix plus `trials` random projected coefficient draws.
template <typename Point>
psd_verdict one_cnd_check(const std::function<Eigen::MatrixXd(const Point&, const Point&)>& gamma,
                          const std::vector<Point>& points, int trials = 64, std::uint64_t seed = 0,
                          std::optional<double> tol = std::nullopt,
                          const numeric_config& cfg = default_config()) {
  const int N = static_cast<int>(points.size());
  if (N == 0) throw validation_error("empty-sample", "one_cnd_check: no points");
  const Eigen::MatrixXd probe = gamma(points[0], points[0]);
  const int p = static_cast<int>(probe.rows());
  Eigen::MatrixXd G(N * p, N * p);
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) {
      const Eigen::MatrixXd bij = gamma(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
      if (j > i) {
        const Eigen::MatrixXd bji = gamma(points[static_cast<std::size_t>(j)], points[static_cast<std::size_t>(i)]);
        const double scale = 1.0 + bij.cwiseAbs().maxCoeff();
        if ((bij - bji.transpose()).cwiseAbs().maxCoeff() > cfg.tau_sym * scale * 1e3)
          throw validation_error("asymmetric-gamma",
                                 "one_cnd_check: Gamma(x,y)^T != Gamma(y,x) on the sample");
      }
      G.block(i * p, j * p, p, p) = bij;
      if (j > i) G.block(j * p, i * p, p, p) = bij.transpose();
    }
  G = 0.5 * (G + G.transpose()).eval();

  const double t = tol.value_or(default_psd_tol(G, cfg));

  // Exact: the constraint is 1^T c = 0 on the stacked vector.
  const Eigen::MatrixXd P = ones_orthogonal_basis(N * p);
  psd_verdict v = psd_check(-(P.transpose() * G * P).eval(), t, cfg);
  if (v.witness) v.witness = (P * (*v.witness)).eval();

  // Randomized cross-check; only worsens the verdict, never improves it.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  for (int k = 0; k < trials; ++k) {
    Eigen::VectorXd c(N * p);
    for (int i = 0; i < c.size(); ++i) c(i) = nd(rng);
    c.array() -= c.mean();
    const double q = c.dot(G * c) / std::max(1.0, c.squaredNorm());
    if (q > t) {
      v.pass = false;
      v.min_eig = std::min(v.min_eig, -q);
      v.witness = c;
    }
  }
  return v;
}

} // namespace metricgp
