#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <string>
#include <vector>

#include "metricgp/errors.hpp"

namespace metricgp::quad {

namespace detail {

// QUADPACK QK21 nodes/weights (positive half, node 0 last).
inline constexpr double gk_nodes[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};

inline constexpr double gk_weights[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Embedded 10-point Gauss weights sit on gk_nodes[1], [3], [5], [7], [9].
inline constexpr double g10_weights[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

} // namespace detail

struct panel_result {
  double value;
  double error;
};

template <typename F>
panel_result gk21(F&& f, double a, double b) {
  const double h = 0.5 * (b - a);
  const double m = 0.5 * (a + b);
  double kron = 0.0;
  double gauss = 0.0;
  const double f0 = f(m);
  kron += detail::gk_weights[10] * f0;
  for (int i = 0; i < 10; ++i) {
    const double x = h * detail::gk_nodes[i];
    const double fsum = f(m - x) + f(m + x);
    kron += detail::gk_weights[i] * fsum;
    if (i % 2 == 1) gauss += detail::g10_weights[i / 2] * fsum;
  }
  kron *= h;
  gauss *= h;
  const double diff = std::abs(kron - gauss);
  // QUADPACK-style sharpened estimate
  const double err = diff > 0.0 ? diff * std::min(1.0, std::pow(200.0 * diff / std::max(1e-300, std::abs(kron) + diff), 1.5)) : 0.0;
  return {kron, std::max(err, diff * 1e-6)};
}

// Globally adaptive GK21 over [a, b]. Throws numeric_error if the interval
// budget is exhausted before reaching max(abs_tol, rel_tol * |I|).
template <typename F>
double adaptive(F&& f, double a, double b, double abs_tol = 1e-10, double rel_tol = 1e-12,
                int max_intervals = 4000) {
  struct interval {
    double a, b, value, error;
    bool operator<(const interval& o) const { return error < o.error; }
  };
  if (a == b) return 0.0;
  std::priority_queue<interval> work;
  panel_result first = gk21(f, a, b);
  work.push({a, b, first.value, first.error});
  double total = first.value;
  double total_err = first.error;
  int used = 1;
  while (total_err > std::max(abs_tol, rel_tol * std::abs(total)) && used < max_intervals) {
    interval top = work.top();
    work.pop();
    const double mid = 0.5 * (top.a + top.b);
    if (mid <= top.a || mid >= top.b) {
      // interval at machine resolution, keep its estimate
      total_err = std::max(0.0, total_err); // nothing further to split
      work.push(top);
      break;
    }
    panel_result left = gk21(f, top.a, mid);
    panel_result right = gk21(f, mid, top.b);
    total += left.value + right.value - top.value;
    total_err += left.error + right.error - top.error;
    work.push({top.a, mid, left.value, left.error});
    work.push({mid, top.b, right.value, right.error});
    ++used;
  }
  if (total_err > std::max(abs_tol, rel_tol * std::abs(total)) * 10.0 && used >= max_intervals) {
    throw numeric_error("adaptive quadrature did not converge: achieved error estimate " +
                        std::to_string(total_err) + " over [" + std::to_string(a) + ", " +
                        std::to_string(b) + "]");
  }
  return total;
}

// Tail of an oscillatory integral as an accelerated alternating series:
// panels of width `period` starting at `a`, partial sums smoothed by
// repeated averaging (Euler transform).
template <typename F>
double oscillatory_tail(F&& f, double a, double period, int n_terms = 48) {
  std::vector<double> partial(static_cast<std::size_t>(n_terms));
  double s = 0.0;
  for (int j = 0; j < n_terms; ++j) {
    s += gk21(f, a + j * period, a + (j + 1) * period).value;
    partial[static_cast<std::size_t>(j)] = s;
  }
  std::size_t len = partial.size();
  while (len > 1) {
    for (std::size_t i = 0; i + 1 < len; ++i) partial[i] = 0.5 * (partial[i] + partial[i + 1]);
    --len;
  }
  return partial[0];
}

} // namespace metricgp::quad
