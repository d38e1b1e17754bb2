#pragma once

namespace metricgp {

// Central numeric tolerances. All relative unless noted.
struct numeric_config {
  double tau_sym = 1e-9;   // accepted asymmetry of "symmetric" inputs
  double tau_orth = 1e-9;  // eigenvector orthogonality
  double tau_rec = 1e-9;   // eigendecomposition reconstruction
  double tau_zero = 1e-10; // eigenvalue zero-snapping threshold
  double tau_psd = 1e-8;   // PSD / CND verdict slack (scaled by 1 + ||A||)
};

inline const numeric_config& default_config() {
  static const numeric_config cfg{};
  return cfg;
}

} // namespace metricgp
