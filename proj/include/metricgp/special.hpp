#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "metricgp/errors.hpp"

namespace metricgp::special {

// Modified Bessel function of the second kind, real order.
inline double bessel_k(double nu, double x) {
  if (!(x > 0.0)) throw numeric_error("bessel_k: argument must be positive, got x=" + std::to_string(x));
  try {
    return boost::math::cyl_bessel_k(nu, x);
  } catch (const std::exception& e) {
    throw numeric_error("bessel_k(nu=" + std::to_string(nu) + ", x=" + std::to_string(x) + "): " + e.what());
  }
}

// log K_nu(x). Falls back to the uniform large-argument expansion once the
// direct value underflows (K_nu(x) ~ sqrt(pi/2x) e^{-x} for x >> nu).
inline double log_bessel_k(double nu, double x) {
  if (!(x > 0.0)) throw numeric_error("log_bessel_k: argument must be positive");
  nu = std::abs(nu);
  if (x < 600.0 + nu * nu) {
    const double v = bessel_k(nu, x);
    if (v > 0.0 && std::isfinite(v)) return std::log(v);
  }
  // Asymptotic series sum_k a_k(nu)/x^k with a_1 = (4nu^2-1)/8, ...
  const double mu = 4.0 * nu * nu;
  double series = 1.0;
  double term = 1.0;
  for (int k = 1; k <= 12; ++k) {
    term *= (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * x);
    series += term;
    if (std::abs(term) < 1e-18 * std::abs(series)) break;
  }
  if (series <= 0.0)
    throw numeric_error("log_bessel_k: asymptotic series failed for nu=" + std::to_string(nu) +
                        ", x=" + std::to_string(x));
  return 0.5 * std::log(std::numbers::pi / (2.0 * x)) - x + std::log(series);
}

// Bessel J of real order.
inline double bessel_j(double nu, double x) {
  try {
    return boost::math::cyl_bessel_j(nu, x);
  } catch (const std::exception& e) {
    throw numeric_error("bessel_j(nu=" + std::to_string(nu) + ", x=" + std::to_string(x) + "): " + e.what());
  }
}

inline double log_gamma(double x) { return boost::math::lgamma(x); }
inline double gamma_fn(double x) { return boost::math::tgamma(x); }

// Sine integral Si(t) = int_0^t sin(u)/u du.
// Power series below t = 4; above, the continued fraction for E1(i t)
// (Ci(t) + i si(t) = -E1(i t), si = Si - pi/2).
inline double sine_integral_Si(double t) {
  const double sign = t < 0.0 ? -1.0 : 1.0;
  t = std::abs(t);
  if (t == 0.0) return 0.0;
  if (t < 4.0) {
    // sum_k (-1)^k t^{2k+1} / ((2k+1)(2k+1)!)
    double sum = t;
    double term = t;
    for (int k = 1; k < 40; ++k) {
      term *= -t * t / ((2.0 * k) * (2.0 * k + 1.0));
      sum += term / (2.0 * k + 1.0);
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sign * sum;
  }
  // Modified Lentz for E1(z), z = i t:
  // E1(z) = e^{-z} * 1/(z + 1 - 1/(z + 3 - 4/(z + 5 - 9/(...))))
  const std::complex<double> z(0.0, t);
  const double tiny = 1e-290;
  std::complex<double> b = z + 1.0;
  std::complex<double> c = 1.0 / tiny;
  std::complex<double> d = 1.0 / b;
  std::complex<double> h = d;
  for (int k = 1; k < 200; ++k) {
    const double a = -static_cast<double>(k) * static_cast<double>(k);
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const std::complex<double> delta = c * d;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-17) break;
  }
  const std::complex<double> e1 = std::exp(-z) * h;
  // si(t) = -Im E1(i t)
  const double si_val = -e1.imag();
  return sign * (si_val + std::numbers::pi / 2.0);
}

// si(t) = Si(t) - pi/2. This is the convention used by the omega kernels:
// it makes omega_2(0) = -(2/pi) si(0) = 1.
inline double sine_integral_si(double t) { return sine_integral_Si(t) - std::numbers::pi / 2.0; }

} // namespace metricgp::special
