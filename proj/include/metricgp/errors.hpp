#pragma once

#include <stdexcept>
#include <string>

namespace metricgp {

// Input documents that fail structural validation. `code` is a stable
// machine-readable tag (e.g. "self-loop", "disconnected"), `what()` carries
// the human-readable diagnostic.
class validation_error : public std::runtime_error {
public:
  validation_error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

// Numerical failures: eigensolver non-convergence, quadrature that cannot
// reach its target, Cholesky breakdown after the jitter budget.
class numeric_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace metricgp
