#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "metricgp/errors.hpp"
#include "metricgp/field.hpp"
#include "metricgp/graph.hpp"
#include "metricgp/linalg.hpp"

namespace metricgp {

// The matrix-valued metric D(u1,u2). It is matrix-homogeneous: one value on
// the diagonal, one off the diagonal, so it is stored as two scalars and
// materialized on demand.
struct multi_metric_value {
  double d_diag = 0.0;
  double d_offdiag = 0.0;
  int p = 0;

  bool is_diagonal_zero() const { return d_diag == 0.0; }
  Eigen::MatrixXd materialize() const { return mp_block_scalar(d_diag, d_offdiag, p); }
  double entry(int i, int j) const { return i == j ? d_diag : d_offdiag; }
};

// Pseudo-variogram of the constructed field, evaluated from its closed form:
// the vertex-field line plus the Brownian-bridge line.
inline multi_metric_value distance_d(const field_model& m, const point_on_graph& u1,
                                     const point_on_graph& u2) {
  const Eigen::VectorXd d1 = m.delta_vector(u1);
  const Eigen::VectorXd d2 = m.delta_vector(u2);
  const Eigen::VectorXd diff = d1 - d2;
  const double v_diag = diff.dot(m.sigma_tilde() * diff);
  const double v_off = d1.dot(m.sigma_tilde() * d1) + d2.dot(m.sigma_tilde() * d2) -
                       2.0 * d1.dot(m.x_tilde() * d2);
  const double ev = m.edge_variance(u1) + m.edge_variance(u2);
  const double br = m.bridge_factor(u1, u2);
  multi_metric_value out;
  out.p = m.p();
  out.d_diag = v_diag + ev - 2.0 * br;
  out.d_offdiag = v_off + ev - 2.0 * m.beta() * br;
  return out;
}

// Pseudo-variogram of an arbitrary covariance oracle:
// Gamma_ij(u1,u2) = K_ii(u1,u1) + K_jj(u2,u2) - 2 K_ij(u1,u2).
inline Eigen::MatrixXd pseudo_variogram_from_cov(
    const std::function<Eigen::MatrixXd(const point_on_graph&, const point_on_graph&)>& cov,
    const point_on_graph& u1, const point_on_graph& u2) {
  const Eigen::MatrixXd v1 = cov(u1, u1);
  const Eigen::MatrixXd v2 = cov(u2, u2);
  const Eigen::MatrixXd c12 = cov(u1, u2);
  const int p = static_cast<int>(c12.rows());
  Eigen::MatrixXd g(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) g(i, j) = v1(i, i) + v2(j, j) - 2.0 * c12(i, j);
  return g;
}

// Marginal (resistance) distance: the diagonal of D.
inline double resistance_dr(const field_model& m, const point_on_graph& u1, const point_on_graph& u2) {
  return distance_d(m, u1, u2).d_diag;
}

// Resistance distance straight from the graph; no field parameters enter the
// diagonal of D.
inline double resistance_dr(const graph_ee& g, const point_on_graph& u1, const point_on_graph& u2,
                            const numeric_config& cfg = default_config()) {
  const Eigen::MatrixXd sigma = pinv(g.laplacian(), cfg);
  const Eigen::VectorXd diff = delta_vector(g, u1) - delta_vector(g, u2);
  return diff.dot(sigma * diff) + edge_variance(g, u1) + edge_variance(g, u2) -
         2.0 * bridge_factor(g, u1, u2);
}

enum class asymptotic_regime {
  p_to_inf_alpha_fixed,   // Q ~ alpha (p-1) I,  X -> Sigma,          D_ij -> d_R (beta -> 1)
  alpha_to_inf_p_fixed,   // same limit objects
  alpha_to_zero_p_fixed,  // Q -> L,  X ~ -1/(alpha n (p-1)) 1 1^T,   D_ij ~ 2/(alpha n p)
  p_to_inf_small_tau,     // alpha = 1/(p tau), 0 < tau <= lambda_{n-1}
  p_to_inf_large_tau      // alpha = 1/(p tau), tau >= lambda_1
};

struct asymptotic_prediction {
  Eigen::MatrixXd Q;
  Eigen::MatrixXd X;
  double d_offdiag = 0.0;
};

// Closed-form limit objects for the five asymptotic regimes, evaluated for a
// finite (p, alpha) so they can be compared against a built model. For the
// tau regimes alpha is implied by alpha = 1/(p tau).
inline asymptotic_prediction asymptotic_limit(const graph_ee& g, asymptotic_regime regime, int p,
                                              double alpha, std::optional<double> tau,
                                              const point_on_graph& u1, const point_on_graph& u2,
                                              const numeric_config& cfg = default_config()) {
  const int n = g.n_vertices();
  const double dp = static_cast<double>(p);
  const Eigen::MatrixXd L = g.laplacian();
  const Eigen::MatrixXd sigma = pinv(L, cfg);
  const auto eig = sym_eig(sigma, cfg);
  const double lambda_max = eig.lambda(0);
  double lambda_min_pos = lambda_max;
  for (int i = 0; i < n; ++i)
    if (eig.lambda(i) > 0.0) lambda_min_pos = eig.lambda(i);

  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(n, n);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  const Eigen::VectorXd d1 = delta_vector(g, u1);
  const Eigen::VectorXd d2 = delta_vector(g, u2);
  const double dr = resistance_dr(g, u1, u2, cfg);

  asymptotic_prediction out;
  switch (regime) {
    case asymptotic_regime::p_to_inf_alpha_fixed:
    case asymptotic_regime::alpha_to_inf_p_fixed:
      out.Q = alpha * (dp - 1.0) * eye;
      out.X = sigma;
      out.d_offdiag = dr;
      return out;
    case asymptotic_regime::alpha_to_zero_p_fixed:
      out.Q = L;
      out.X = -1.0 / (alpha * n * (dp - 1.0)) * ones;
      out.d_offdiag = 2.0 / (alpha * n * dp);
      return out;
    case asymptotic_regime::p_to_inf_small_tau: {
      if (!tau) throw validation_error("missing-tau", "small-tau regime requires tau");
      if (!(*tau > 0.0 && *tau <= lambda_min_pos + cfg.tau_psd))
        throw validation_error("tau-range", "small-tau regime requires 0 < tau <= " +
                                                std::to_string(lambda_min_pos));
      out.Q = eye / *tau;
      out.X = sigma - *tau * eye;
      out.d_offdiag = dr + 2.0 * (*tau) * d1.dot(d2);
      return out;
    }
    case asymptotic_regime::p_to_inf_large_tau: {
      if (!tau) throw validation_error("missing-tau", "large-tau regime requires tau");
      if (!(*tau >= lambda_max - cfg.tau_psd))
        throw validation_error("tau-range",
                               "large-tau regime requires tau >= " + std::to_string(lambda_max));
      out.Q = L + ones / (n * *tau);
      out.X = -(*tau / n) * ones;
      out.d_offdiag = dr + 2.0 * (*tau) / n + 2.0 * d1.dot(sigma * d2);
      return out;
    }
  }
  throw validation_error("bad-regime", "unknown asymptotic regime");
}

} // namespace metricgp
