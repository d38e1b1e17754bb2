#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "metricgp/errors.hpp"
#include "metricgp/field.hpp"
#include "metricgp/metric.hpp"
#include "metricgp/psd.hpp"
#include "metricgp/special.hpp"

namespace metricgp {

// ---------------------------------------------------------------------------
// Scalar families
// ---------------------------------------------------------------------------

// Shkarofsky-Gneiting: (1 + t/beta)^{-nu/2} K_nu(sqrt((beta+t)/alpha)) / K_nu(sqrt(beta/alpha)).
// Evaluated in log space so deep Bessel tails do not underflow.
inline double sg_scalar(double t, double alpha, double beta, double nu) {
  if (!(t >= 0.0)) throw validation_error("bad-argument", "sg_scalar: t must be >= 0");
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw validation_error("bad-parameter", "sg_scalar: alpha and beta must be positive");
  if (t == 0.0) return 1.0;
  const double log_num = special::log_bessel_k(nu, std::sqrt((beta + t) / alpha));
  const double log_den = special::log_bessel_k(nu, std::sqrt(beta / alpha));
  return std::exp(-0.5 * nu * std::log1p(t / beta) + log_num - log_den);
}

// Matern in the paper's parameterization: 2^{1-nu}/Gamma(nu) (t/alpha)^{nu/2} K_nu(sqrt(t/alpha)),
// with the removable singularity at t = 0 evaluated as its limit 1.
inline double matern_scalar(double t, double alpha, double nu) {
  if (!(t >= 0.0)) throw validation_error("bad-argument", "matern_scalar: t must be >= 0");
  if (!(alpha > 0.0) || !(nu > 0.0))
    throw validation_error("bad-parameter", "matern_scalar: alpha and nu must be positive");
  if (t == 0.0) return 1.0;
  const double x = std::sqrt(t / alpha);
  const double lg = (1.0 - nu) * std::numbers::ln2 - special::log_gamma(nu) + nu * std::log(x) +
                    special::log_bessel_k(nu, x);
  return std::exp(lg);
}

inline double cauchy_scalar(double t, double beta, double nu) {
  if (!(t >= 0.0)) throw validation_error("bad-argument", "cauchy_scalar: t must be >= 0");
  if (!(beta > 0.0) || !(nu > 0.0))
    throw validation_error("bad-parameter", "cauchy_scalar: beta and nu must be positive");
  return std::exp(-nu * std::log1p(t / beta));
}

// ---------------------------------------------------------------------------
// Completely monotone / Bernstein catalogs
// ---------------------------------------------------------------------------

enum class cm_family { exp_neg, sg, matern, cauchy };
enum class bernstein_family { power, ratio, log1p };

struct cm_function {
  cm_family family = cm_family::exp_neg;
  double a = 1.0;  // alpha for sg/matern
  double b = 1.0;  // beta for sg/cauchy
  double nu = 0.5;

  // user-supplied function, usable only with an explicit CM assertion
  std::function<double(double)> custom;
  bool asserted_cm = false;

  double operator()(double t) const {
    if (custom) {
      if (!asserted_cm)
        throw validation_error("uncatalogued-psi",
                               "custom psi requires an explicit complete-monotonicity assertion");
      return custom(t);
    }
    switch (family) {
      case cm_family::exp_neg: return std::exp(-t);
      case cm_family::sg: return sg_scalar(t, a, b, nu);
      case cm_family::matern: return matern_scalar(t, a, nu);
      case cm_family::cauchy: return cauchy_scalar(t, b, nu);
    }
    throw validation_error("uncatalogued-psi", "unknown psi family");
  }
};

struct bernstein_function {
  bernstein_family family = bernstein_family::power;
  double theta = 1.0; // exponent for the power family, in (0, 1]

  std::function<double(double)> custom;
  bool asserted_bernstein = false;

  double operator()(double t) const {
    if (custom) {
      if (!asserted_bernstein)
        throw validation_error("uncatalogued-g", "custom g requires an explicit Bernstein assertion");
      return custom(t);
    }
    switch (family) {
      case bernstein_family::power:
        if (!(theta > 0.0 && theta <= 1.0))
          throw validation_error("bad-theta", "power Bernstein function requires theta in (0,1]");
        return std::pow(t, theta);
      case bernstein_family::ratio: return t / (1.0 + t);
      case bernstein_family::log1p: return std::log1p(t);
    }
    throw validation_error("uncatalogued-g", "unknown g family");
  }
};

// ---------------------------------------------------------------------------
// Kernel specs and validity certificates
// ---------------------------------------------------------------------------

struct composed_params {
  cm_function psi;
  bernstein_function g;
  double xi = 1.0;
};

struct sg2_params {
  double sigma1 = 1.0, sigma2 = 1.0, rho = 0.0;
  double alpha1 = 1.0, alpha2 = 1.0, alpha12 = 0.25;
  double beta1 = 1.0, beta2 = 1.0, beta12 = 1.0;
  double nu1 = 0.5, nu2 = 0.5, nu12 = 0.5;
  double theta = 1.0;
};

struct matern_p_params {
  Eigen::MatrixXd sigma, alpha, nu;
  double theta = 1.0;
  std::optional<double> b; // Theorem case-B scale; searched when absent
};

struct cauchy_p_params {
  Eigen::MatrixXd sigma, beta;
  double nu = 1.0;
  double theta = 1.0;
};

struct sg_p_params {
  Eigen::MatrixXd sigma, alpha, beta;
  double nu = 1.0;
  double theta = 1.0;
};

struct mixture_params {
  double theta = 1.0;
  std::vector<std::pair<double, Eigen::MatrixXd>> atoms; // (xi_k, F_k)
  int p = 1;
};

struct certificate_check {
  std::string condition;
  bool pass = false;
  double margin = 0.0; // comfortably valid when >= 0; NaN when undefined as written
};

struct validity_certificate {
  std::string theorem = "none"; // T2, T3, T4A, T4B, T5A, T5B, T6, T7
  std::vector<certificate_check> checks;
  bool sampled = false;

  bool valid() const {
    if (checks.empty()) return false;
    for (const auto& c : checks)
      if (!c.pass || std::isnan(c.margin)) return false;
    return true;
  }
};

struct kernel_spec {
  std::variant<composed_params, sg2_params, matern_p_params, cauchy_p_params, sg_p_params,
               mixture_params>
      params;
  std::optional<validity_certificate> certificate;
  bool override_validity = false; // caller-asserted validity, bypasses the certificate gate

  int p() const {
    if (const auto* m = std::get_if<matern_p_params>(&params)) return static_cast<int>(m->sigma.rows());
    if (const auto* c = std::get_if<cauchy_p_params>(&params)) return static_cast<int>(c->sigma.rows());
    if (const auto* s = std::get_if<sg_p_params>(&params)) return static_cast<int>(s->sigma.rows());
    if (std::holds_alternative<sg2_params>(params)) return 2;
    if (const auto* mx = std::get_if<mixture_params>(&params)) return mx->p;
    return 0; // composed kernels take p from the field model
  }
};

// ---------------------------------------------------------------------------
// Certification (Theorems 4-7 plus the composed/mixture gates)
// ---------------------------------------------------------------------------

namespace detail {

// log A(alpha,beta,nu) with A = 2^{nu-1} (alpha beta)^{nu/2} / K_nu(sqrt(beta/alpha)).
inline double log_sg_norm_const(double alpha, double beta, double nu) {
  return (nu - 1.0) * std::numbers::ln2 + 0.5 * nu * std::log(alpha * beta) -
         special::log_bessel_k(nu, std::sqrt(beta / alpha));
}

// log B(alpha,beta,nu) of the full-model bound, evaluated as written; NaN
// propagates when the expression leaves its domain.
inline double log_sg_full_factor(double alpha, double beta, double nu) {
  const double s = std::sqrt(alpha * beta + nu * nu);
  const double base = (nu - s) / (2.0 * beta);
  const double lb = nu * std::log(base); // NaN for base <= 0
  return lb + (alpha * beta + nu * (-nu - s)) / (-nu + s);
}

inline void require_symmetric_params(const Eigen::MatrixXd& M, const char* name) {
  if (M.rows() != M.cols() || (M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + M.cwiseAbs().maxCoeff()))
    throw validation_error("asymmetric-parameters", std::string(name) + " parameter matrix must be symmetric");
}

inline certificate_check cnd_condition(const std::string& name, const Eigen::MatrixXd& M) {
  const psd_verdict v = cnd_check(M);
  return {name, v.pass, v.min_eig};
}

inline certificate_check psd_condition(const std::string& name, const Eigen::MatrixXd& M) {
  const psd_verdict v = psd_check(M);
  return {name, v.pass, v.min_eig};
}

} // namespace detail

inline validity_certificate certify_sg2(const sg2_params& q) {
  validity_certificate cert;
  const double a_target = 0.5 * q.alpha1 * q.alpha2 / (q.alpha1 + q.alpha2);
  const double b_target = 0.5 * (q.beta1 + q.beta2);
  const double n_target = 0.5 * (q.nu1 + q.nu2);
  const double eq_tol = 1e-12;
  const bool parsimonious = std::abs(q.alpha12 - a_target) <= eq_tol * (1.0 + std::abs(a_target)) &&
                            std::abs(q.beta12 - b_target) <= eq_tol * (1.0 + std::abs(b_target)) &&
                            std::abs(q.nu12 - n_target) <= eq_tol * (1.0 + std::abs(n_target));
  const double log_a1 = detail::log_sg_norm_const(q.alpha1, q.beta1, q.nu1);
  const double log_a2 = detail::log_sg_norm_const(q.alpha2, q.beta2, q.nu2);
  const double log_a12 = detail::log_sg_norm_const(q.alpha12, q.beta12, q.nu12);
  if (parsimonious) {
    cert.theorem = "T4A";
    cert.checks.push_back({"alpha12 = alpha1 alpha2 / (2 (alpha1 + alpha2))", true,
                           -std::abs(q.alpha12 - a_target)});
    cert.checks.push_back({"beta12 = (beta1 + beta2)/2", true, -std::abs(q.beta12 - b_target)});
    cert.checks.push_back({"nu12 = (nu1 + nu2)/2", true, -std::abs(q.nu12 - n_target)});
    const double bound = std::exp(0.5 * (log_a1 + log_a2) - log_a12);
    cert.checks.push_back({"|rho| <= sqrt(A1 A2 / A12^2)", std::abs(q.rho) <= bound,
                           bound - std::abs(q.rho)});
    return cert;
  }
  cert.theorem = "T4B";
  cert.checks.push_back({"alpha12 < alpha1 alpha2 / (2 (alpha1 + alpha2))", q.alpha12 < a_target,
                         a_target - q.alpha12});
  cert.checks.push_back({"beta12 > (beta1 + beta2)/2", q.beta12 > b_target, q.beta12 - b_target});
  cert.checks.push_back({"nu12 != (nu1 + nu2)/2", q.nu12 != n_target, std::abs(q.nu12 - n_target)});
  const double log_b = detail::log_sg_full_factor(1.0 / q.alpha1 + 1.0 / q.alpha2 - 0.5 / q.alpha12,
                                                  q.beta1 + q.beta2 - 2.0 * q.beta12,
                                                  q.nu1 + q.nu2 - 2.0 * q.nu12);
  const double bound = std::exp(0.5 * (log_a1 + log_a2 + log_b) - log_a12);
  const double margin = bound - std::abs(q.rho);
  cert.checks.push_back({"|rho| <= sqrt(A1 A2 B / A12^2)",
                         !std::isnan(margin) && std::abs(q.rho) <= bound, margin});
  return cert;
}

inline validity_certificate certify_matern_p(const matern_p_params& q) {
  detail::require_symmetric_params(q.sigma, "sigma");
  detail::require_symmetric_params(q.alpha, "alpha");
  detail::require_symmetric_params(q.nu, "nu");
  const int p = static_cast<int>(q.sigma.rows());

  auto case_a = [&]() {
    validity_certificate c;
    c.theorem = "T5A";
    c.checks.push_back(detail::cnd_condition("[nu_ij] CND", q.nu));
    c.checks.push_back(detail::cnd_condition("[nu_ij alpha_ij] CND", q.nu.cwiseProduct(q.alpha)));
    Eigen::MatrixXd m(p, p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) {
        const double nu = q.nu(i, j);
        m(i, j) = q.sigma(i, j) * std::exp(nu * std::log(nu) - nu - special::log_gamma(nu));
      }
    c.checks.push_back(detail::psd_condition("[sigma_ij nu^nu e^-nu / Gamma(nu)] PSD", m));
    return c;
  };
  auto case_b = [&](double b) {
    validity_certificate c;
    c.theorem = "T5B";
    c.checks.push_back(detail::cnd_condition("[nu_ij] CND", q.nu));
    c.checks.push_back(detail::cnd_condition("[1/alpha_ij - b nu_ij] CND",
                                             (q.alpha.cwiseInverse() - b * q.nu).eval()));
    Eigen::MatrixXd m(p, p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) {
        const double nu = q.nu(i, j);
        m(i, j) = q.sigma(i, j) * std::exp(-nu * std::log(b * q.alpha(i, j)) - nu);
      }
    c.checks.push_back(detail::psd_condition("[sigma_ij (b alpha_ij)^-nu e^-nu] PSD", m));
    c.checks.push_back({"b > 0", b > 0.0, b});
    return c;
  };

  if (q.b) return case_b(*q.b);
  validity_certificate best = case_a();
  if (best.valid()) return best;
  for (int k = 0; k <= 24; ++k) {
    const double b = std::pow(10.0, -3.0 + 6.0 * k / 24.0);
    validity_certificate c = case_b(b);
    if (c.valid()) return c;
  }
  return best; // report case A margins when nothing certifies
}

inline validity_certificate certify_cauchy_p(const cauchy_p_params& q) {
  detail::require_symmetric_params(q.sigma, "sigma");
  detail::require_symmetric_params(q.beta, "beta");
  validity_certificate c;
  c.theorem = "T6";
  c.checks.push_back({"nu > 0", q.nu > 0.0, q.nu});
  c.checks.push_back(detail::cnd_condition("[beta_ij] CND", q.beta));
  Eigen::MatrixXd m = q.sigma.cwiseProduct(q.beta.array().pow(q.nu).matrix());
  c.checks.push_back(detail::psd_condition("[sigma_ij beta_ij^nu] PSD", m));
  return c;
}

inline validity_certificate certify_sg_p(const sg_p_params& q) {
  detail::require_symmetric_params(q.sigma, "sigma");
  detail::require_symmetric_params(q.alpha, "alpha");
  detail::require_symmetric_params(q.beta, "beta");
  const int p = static_cast<int>(q.sigma.rows());
  validity_certificate c;
  c.theorem = "T7";
  c.checks.push_back(detail::cnd_condition("[1/alpha_ij] CND", q.alpha.cwiseInverse().eval()));
  c.checks.push_back(detail::cnd_condition("[beta_ij] CND", q.beta));
  Eigen::MatrixXd m(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      m(i, j) = q.sigma(i, j) *
                std::exp(0.5 * q.nu * std::log(q.alpha(i, j) * q.beta(i, j)) -
                         special::log_bessel_k(q.nu, std::sqrt(q.beta(i, j) / q.alpha(i, j))));
  c.checks.push_back(detail::psd_condition("[sigma_ij (alpha beta)^{nu/2} / K_nu(sqrt(beta/alpha))] PSD", m));
  return c;
}

inline validity_certificate certify_composed(const composed_params& q) {
  validity_certificate c;
  c.theorem = "T2";
  const bool psi_ok = q.psi.custom ? q.psi.asserted_cm : true;
  const bool g_ok = q.g.custom ? q.g.asserted_bernstein : true;
  c.checks.push_back({"psi in the completely monotone catalog", psi_ok,
                      psi_ok ? 0.0 : std::numeric_limits<double>::quiet_NaN()});
  c.checks.push_back({"g in the Bernstein catalog", g_ok,
                      g_ok ? 0.0 : std::numeric_limits<double>::quiet_NaN()});
  c.checks.push_back({"xi > 0", q.xi > 0.0, q.xi});
  if (!q.g.custom && q.g.family == bernstein_family::power)
    c.checks.push_back({"theta in (0,1]", q.g.theta > 0.0 && q.g.theta <= 1.0,
                        std::min(q.g.theta, 1.0 - q.g.theta) + (q.g.theta > 0.0 && q.g.theta <= 1.0 ? 0.0 : -1.0)});
  return c;
}

inline validity_certificate certify_mixture(const mixture_params& q) {
  validity_certificate c;
  c.theorem = "T3";
  c.checks.push_back({"theta in (0,1]", q.theta > 0.0 && q.theta <= 1.0, q.theta});
  for (std::size_t k = 0; k < q.atoms.size(); ++k) {
    const auto& [xi, f] = q.atoms[k];
    c.checks.push_back({"xi_" + std::to_string(k) + " >= 0", xi >= 0.0, xi});
    c.checks.push_back(detail::psd_condition("F_" + std::to_string(k) + " PSD", f));
  }
  if (q.atoms.empty()) c.checks.push_back({"mixture may be empty", true, 0.0});
  return c;
}

inline validity_certificate certify(const kernel_spec& spec) {
  return std::visit(
      [](const auto& q) -> validity_certificate {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, composed_params>) return certify_composed(q);
        else if constexpr (std::is_same_v<T, sg2_params>) return certify_sg2(q);
        else if constexpr (std::is_same_v<T, matern_p_params>) return certify_matern_p(q);
        else if constexpr (std::is_same_v<T, cauchy_p_params>) return certify_cauchy_p(q);
        else if constexpr (std::is_same_v<T, sg_p_params>) return certify_sg_p(q);
        else return certify_mixture(q);
      },
      spec.params);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

// Element-wise psi(xi g(D)) (Theorem 2 composition).
inline Eigen::MatrixXd compose_kernel(const composed_params& q, const multi_metric_value& d) {
  const double on = q.psi(q.xi * q.g(d.d_diag));
  const double off = q.psi(q.xi * q.g(d.d_offdiag));
  return mp_block_scalar(on, off, d.p);
}

// Finite discrete scale mixture sum_k F_k exp(-xi_k D^theta) (Theorem 3 with
// an atomic measure).
inline Eigen::MatrixXd mixture_kernel(const mixture_params& q, const multi_metric_value& d) {
  const int p = q.atoms.empty() ? (q.p > 0 ? q.p : d.p) : static_cast<int>(q.atoms.front().second.rows());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(p, p);
  if (!(q.theta > 0.0 && q.theta <= 1.0))
    throw validation_error("bad-theta", "mixture_kernel: theta must lie in (0,1]");
  const double don = std::pow(d.d_diag, q.theta);
  const double doff = std::pow(d.d_offdiag, q.theta);
  for (const auto& [xi, f] : q.atoms) {
    if (f.rows() != p || f.cols() != p)
      throw validation_error("size-mismatch", "mixture_kernel: atom size mismatch");
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) out(i, j) += f(i, j) * std::exp(-xi * (i == j ? don : doff));
  }
  return out;
}

inline void require_evaluable(const kernel_spec& spec) {
  if (spec.override_validity) return;
  if (!spec.certificate || !spec.certificate->valid())
    throw validation_error("uncertified-spec",
                           "kernel spec has no valid certificate; certify it or set the explicit override");
}

// Entry-wise family evaluation over the metric (Eqs. for SG2 / Matern-p /
// Cauchy-p / SG-p displays).
inline Eigen::MatrixXd eval_multivariate_kernel(const kernel_spec& spec, const field_model& m,
                                                const point_on_graph& u1, const point_on_graph& u2) {
  require_evaluable(spec);
  const int sp = spec.p();
  if (sp != 0 && sp != m.p())
    throw validation_error("p-mismatch", "kernel spec p = " + std::to_string(sp) +
                                             " does not match model p = " + std::to_string(m.p()));
  const multi_metric_value d = distance_d(m, u1, u2);

  return std::visit(
      [&](const auto& q) -> Eigen::MatrixXd {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, composed_params>) {
          return compose_kernel(q, d);
        } else if constexpr (std::is_same_v<T, mixture_params>) {
          return mixture_kernel(q, d);
        } else if constexpr (std::is_same_v<T, sg2_params>) {
          Eigen::MatrixXd k(2, 2);
          const double d11 = std::pow(d.d_diag, q.theta);
          const double d12 = std::pow(d.d_offdiag, q.theta);
          k(0, 0) = q.sigma1 * q.sigma1 * sg_scalar(d11, q.alpha1, q.beta1, q.nu1);
          k(1, 1) = q.sigma2 * q.sigma2 * sg_scalar(d11, q.alpha2, q.beta2, q.nu2);
          k(0, 1) = k(1, 0) = q.sigma1 * q.sigma2 * q.rho * sg_scalar(d12, q.alpha12, q.beta12, q.nu12);
          return k;
        } else if constexpr (std::is_same_v<T, matern_p_params>) {
          const int p = static_cast<int>(q.sigma.rows());
          Eigen::MatrixXd k(p, p);
          for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j)
              k(i, j) = q.sigma(i, j) *
                        matern_scalar(std::pow(d.entry(i, j), q.theta), q.alpha(i, j), q.nu(i, j));
          return k;
        } else if constexpr (std::is_same_v<T, cauchy_p_params>) {
          const int p = static_cast<int>(q.sigma.rows());
          Eigen::MatrixXd k(p, p);
          for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j)
              k(i, j) = q.sigma(i, j) *
                        cauchy_scalar(std::pow(d.entry(i, j), q.theta), q.beta(i, j), q.nu);
          return k;
        } else {
          static_assert(std::is_same_v<T, sg_p_params>);
          const int p = static_cast<int>(q.sigma.rows());
          Eigen::MatrixXd k(p, p);
          for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j)
              k(i, j) = q.sigma(i, j) * sg_scalar(std::pow(d.entry(i, j), q.theta), q.alpha(i, j),
                                                  q.beta(i, j), q.nu);
          return k;
        }
      },
      spec.params);
}

// Collocated correlation scaling (Schur product): K~_ij = sigma_i sigma_j rho_ij K_ij.
inline Eigen::MatrixXd scale_collocated(const Eigen::MatrixXd& k, const Eigen::VectorXd& sigma,
                                        const Eigen::MatrixXd& rho) {
  if (sigma.size() != k.rows() || rho.rows() != k.rows() || rho.cols() != k.cols())
    throw validation_error("size-mismatch", "scale_collocated: dimension mismatch");
  Eigen::MatrixXd out = k;
  for (int i = 0; i < k.rows(); ++i)
    for (int j = 0; j < k.cols(); ++j) out(i, j) *= sigma(i) * sigma(j) * rho(i, j);
  return out;
}

} // namespace metricgp
