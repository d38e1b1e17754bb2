#pragma once

#include <cmath>
#include <memory>
#include <mutex>
#include <string>

#include <Eigen/Dense>

#include "metricgp/config.hpp"
#include "metricgp/errors.hpp"
#include "metricgp/graph.hpp"
#include "metricgp/linalg.hpp"

namespace metricgp {

// Interpolation weight vector of a point: 1-delta at the lower endpoint of
// its edge, delta at the upper, one-hot at vertices.
inline Eigen::VectorXd delta_vector(const graph_ee& g, const point_on_graph& u) {
  g.require_own(u);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(g.n_vertices());
  if (u.is_vertex) {
    d(u.vertex) = 1.0;
  } else {
    const auto& e = g.edges()[static_cast<std::size_t>(u.edge)];
    d(e.from) = 1.0 - u.delta;
    d(e.to) = u.delta;
  }
  return d;
}

// Brownian-bridge covariance factor l(e) (d1 ^ d2 - d1 d2); zero unless both
// points are interior to the same edge (the bridge vanishes at vertices).
inline double bridge_factor(const graph_ee& g, const point_on_graph& u1, const point_on_graph& u2) {
  g.require_own(u1);
  g.require_own(u2);
  if (u1.is_vertex || u2.is_vertex || u1.edge != u2.edge) return 0.0;
  const double l = g.edges()[static_cast<std::size_t>(u1.edge)].length;
  return l * (std::min(u1.delta, u2.delta) - u1.delta * u2.delta);
}

// Within-edge variance contribution l(e) d (1 - d) of one point.
inline double edge_variance(const graph_ee& g, const point_on_graph& u) {
  g.require_own(u);
  if (u.is_vertex) return 0.0;
  const double l = g.edges()[static_cast<std::size_t>(u.edge)].length;
  return l * u.delta * (1.0 - u.delta);
}

// The constructed p-variate field Z = Z_V + Z_E on a graph. Holds the n x n
// operators (L, Sigma, Q, X and their rank-one shifts) plus the block
// pattern constants. Immutable after build; evaluation is pure.
class field_model {
public:
  static field_model build(std::shared_ptr<const graph_ee> g, int p, double alpha, double beta,
                           const numeric_config& cfg = default_config()) {
    if (!g) throw validation_error("null-graph", "field_model: graph is null");
    if (p < 2)
      throw validation_error("bad-p",
                             "field_model: p must be an integer >= 2 (for p = 1 use the scalar "
                             "resistance metric directly)");
    if (!(alpha > 0.0)) throw validation_error("bad-alpha", "field_model: alpha must be positive");
    if (!(beta >= 0.0 && beta <= 1.0))
      throw validation_error("bad-beta", "field_model: beta must lie in [0,1]");

    field_model m;
    m.graph_ = std::move(g);
    m.p_ = p;
    m.alpha_ = alpha;
    m.beta_ = beta;
    const int n = m.graph_->n_vertices();
    m.L_ = m.graph_->laplacian();
    m.sigma_ = pinv(m.L_, cfg);
    m.eig_ = sym_eig(m.sigma_, cfg);

    // Q and X from the spectral forms: the square roots act on diagonal
    // arguments, so they are element-wise on the eigenvalues of Sigma.
    Eigen::VectorXd q(n), x(n);
    const double dp = static_cast<double>(p);
    for (int i = 0; i < n; ++i) {
      const double lam = m.eig_.lambda(i);
      if (lam > 0.0) {
        const double lm = 1.0 / lam;
        q(i) = 0.5 * (lm + alpha * (dp - 2.0) + std::sqrt(lm * lm - 2.0 * alpha * (dp - 2.0) * lm + alpha * alpha * dp * dp));
        x(i) = (alpha * (dp - 2.0) * lam +
                std::sqrt(1.0 - 2.0 * alpha * (dp - 2.0) * lam + alpha * alpha * dp * dp * lam * lam) - 1.0) /
               (2.0 * alpha * (dp - 1.0));
      } else {
        q(i) = alpha * (dp - 1.0);
        x(i) = -1.0 / (alpha * (dp - 1.0));
      }
    }
    m.Q_ = m.eig_.W * q.asDiagonal() * m.eig_.W.transpose();
    m.X_ = m.eig_.W * x.asDiagonal() * m.eig_.W.transpose();
    m.q_eigs_ = q;

    const double np2 = alpha * n * dp * dp;
    m.k1_ = (dp - 1.0) / np2;
    m.k2_ = (dp * dp - dp + 1.0) / (np2 * (dp - 1.0));
    m.sigma_tilde_ = m.sigma_ + Eigen::MatrixXd::Constant(n, n, m.k1_);
    m.x_tilde_ = m.X_ + Eigen::MatrixXd::Constant(n, n, m.k2_);
    return m;
  }

  static field_model build(const graph_ee& g, int p, double alpha, double beta,
                           const numeric_config& cfg = default_config()) {
    return build(std::make_shared<const graph_ee>(g), p, alpha, beta, cfg);
  }

  const graph_ee& graph() const { return *graph_; }
  std::shared_ptr<const graph_ee> graph_ptr() const { return graph_; }
  int p() const { return p_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double k1() const { return k1_; }
  double k2() const { return k2_; }
  const Eigen::MatrixXd& laplacian() const { return L_; }
  const Eigen::MatrixXd& sigma() const { return sigma_; }
  const Eigen::MatrixXd& Q() const { return Q_; }
  const Eigen::MatrixXd& X() const { return X_; }
  const Eigen::MatrixXd& sigma_tilde() const { return sigma_tilde_; }
  const Eigen::MatrixXd& x_tilde() const { return x_tilde_; }
  const sym_eig_result& sigma_eig() const { return eig_; }
  const Eigen::VectorXd& q_eigenvalues() const { return q_eigs_; }

  // Block precision matrix of Z_V on the vertices.
  Eigen::MatrixXd theta() const {
    const int n = graph_->n_vertices();
    return mp_block(Q_, -alpha_ * Eigen::MatrixXd::Identity(n, n), p_);
  }

  // np x np covariance of Z_V over all vertices, cached for vertex-only
  // workloads.
  const Eigen::MatrixXd& k_tilde() const {
    std::call_once(cache_->once, [this] {
      cache_->value = std::make_unique<Eigen::MatrixXd>(mp_block(sigma_tilde_, x_tilde_, p_));
    });
    return *cache_->value;
  }

  Eigen::VectorXd delta_vector(const point_on_graph& u) const { return metricgp::delta_vector(*graph_, u); }

  double bridge_factor(const point_on_graph& u1, const point_on_graph& u2) const {
    return metricgp::bridge_factor(*graph_, u1, u2);
  }

  double edge_variance(const point_on_graph& u) const { return metricgp::edge_variance(*graph_, u); }

  // Scalar pieces of the vertex-field covariance: (sigma~, x~) bilinear forms.
  double sigma_form(const point_on_graph& u1, const point_on_graph& u2) const {
    return quad_form(sigma_tilde_, u1, u2);
  }
  double x_form(const point_on_graph& u1, const point_on_graph& u2) const {
    return quad_form(x_tilde_, u1, u2);
  }

  Eigen::MatrixXd cov_zv(const point_on_graph& u1, const point_on_graph& u2) const {
    return mp_block_scalar(sigma_form(u1, u2), x_form(u1, u2), p_);
  }

  Eigen::MatrixXd cov_ze(const point_on_graph& u1, const point_on_graph& u2) const {
    const double c = bridge_factor(u1, u2);
    return mp_block_scalar(c, beta_ * c, p_);
  }

  Eigen::MatrixXd cov_z(const point_on_graph& u1, const point_on_graph& u2) const {
    const double c = bridge_factor(u1, u2);
    return mp_block_scalar(sigma_form(u1, u2) + c, x_form(u1, u2) + beta_ * c, p_);
  }

private:
  field_model() = default;

  double quad_form(const Eigen::MatrixXd& M, const point_on_graph& u1, const point_on_graph& u2) const {
    const Eigen::VectorXd d1 = delta_vector(u1);
    const Eigen::VectorXd d2 = delta_vector(u2);
    return d1.dot(M * d2);
  }

  std::shared_ptr<const graph_ee> graph_;
  int p_ = 0;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  double k1_ = 0.0;
  double k2_ = 0.0;
  Eigen::MatrixXd L_, sigma_, Q_, X_, sigma_tilde_, x_tilde_;
  Eigen::VectorXd q_eigs_;
  sym_eig_result eig_;

  struct lazy_block {
    std::once_flag once;
    std::unique_ptr<Eigen::MatrixXd> value;
  };
  std::shared_ptr<lazy_block> cache_ = std::make_shared<lazy_block>();
};

} // namespace metricgp
