// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Straight-line reference formulas used to check the library. Written
// without calling into it.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

// ã = M a / sum|a| ; s = softmax(ã) * (-ã) ; w = M softmax(f s)
inline std::vector<double> raw_weights(const std::vector<double>& a, double f) {
  const double m = static_cast<double>(a.size());
  double abs_sum = 0;
  for (double x : a) abs_sum += std::fabs(x);
  std::vector<double> an(a.size(), 0.0);
  if (abs_sum > 0)
    for (std::size_t i = 0; i < a.size(); ++i) an[i] = m * a[i] / abs_sum;
  double z = 0;
  for (double x : an) z += std::exp(x);
  std::vector<double> s(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) s[i] = std::exp(an[i]) / z * -an[i];
  double z2 = 0;
  for (double x : s) z2 += std::exp(f * x);
  std::vector<double> w(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) w[i] = m * std::exp(f * s[i]) / z2;
  return w;
}

inline std::vector<double> ema(const std::vector<double>& prev, const std::vector<double>& raw, double alpha) {
  std::vector<double> out(prev.size());
  for (std::size_t i = 0; i < prev.size(); ++i) out[i] = alpha * prev[i] + (1 - alpha) * raw[i];
  return out;
}

// (L - lo) / (max - lo), lo = min(window min, eps), clamped to [0, 1].
inline std::vector<double> normalize(const std::vector<double>& h, double eps) {
  const double mn = *std::min_element(h.begin(), h.end());
  const double mx = *std::max_element(h.begin(), h.end());
  const double lo = std::min(mn, eps);
  std::vector<double> out;
  for (double v : h) out.push_back(std::clamp((v - lo) / (mx - lo), 0.0, 1.0));
  return out;
}

// OLS slope against x = 0..n-1 via the textbook two-sum form.
inline double ols_slope(const std::vector<double>& y) {
  const double n = static_cast<double>(y.size());
  double sx = 0, sy = 0, sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double x = static_cast<double>(k);
    sx += x;
    sy += y[k];
    sxy += x * y[k];
    sxx += x * x;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// w_i = alpha (1 / L_i) / sum_j (1 / L_j)
inline std::vector<double> calibrated_weights(const std::vector<double>& l, double alpha) {
  double inv = 0;
  for (double x : l) inv += 1.0 / x;
  std::vector<double> w;
  for (double x : l) w.push_back(alpha / x / inv);
  return w;
}

// Central difference of f at x along every coordinate.
inline std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& f,
                                              std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double x0 = x[i];
    x[i] = x0 + h;
    const double fp = f(x);
    x[i] = x0 - h;
    const double fm = f(x);
    x[i] = x0;
    g[i] = (fp - fm) / (2 * h);
  }
  return g;
}

// max_i |a_i - b_i| / max(|b|_inf, floor)
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b, double floor = 1e-8) {
  double num = 0, den = floor;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::fabs(a[i] - b[i]));
    den = std::max(den, std::fabs(b[i]));
  }
  return num / den;
}

inline double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

}  // namespace oracle
