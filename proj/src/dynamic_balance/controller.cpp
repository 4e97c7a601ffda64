// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#include "ombal/dynamic_balance/controller.hpp"

#include <algorithm>
#include <cmath>

#include "ombal/error.hpp"

namespace ombal::dynamic_balance {

void LossWindow::push(double loss) {
  values_.push_back(loss);
  if (values_.size() > capacity_) values_.pop_front();
}

std::vector<double> normalize_window(std::span<const double> history, double eps) {
  if (history.empty()) throw LengthMismatch("normalize_window: empty window");
  const auto [lo_it, hi_it] = std::minmax_element(history.begin(), history.end());
  const double hi = *hi_it;
  if (hi <= eps) throw DegenerateWindow("window maximum " + std::to_string(hi) + " is not above eps");
  const double lo = std::min(*lo_it, eps);
  const double span = hi - lo;
  std::vector<double> out;
  out.reserve(history.size());
  for (double v : history) out.push_back(std::clamp((v - lo) / span, 0.0, 1.0));
  return out;
}

SlopeFit fit_slope(std::span<const double> y) {
  if (y.size() < 2) throw LengthMismatch("fit_slope needs at least two points");
  const double n = static_cast<double>(y.size());
  const double x_mean = (n - 1.0) / 2.0;
  double y_mean = 0.0;
  for (double v : y) y_mean += v;
  y_mean /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double dx = static_cast<double>(k) - x_mean;
    sxy += dx * (y[k] - y_mean);
    sxx += dx * dx;
  }
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = y_mean - fit.slope * x_mean;
  fit.normalized_losses.assign(y.begin(), y.end());
  return fit;
}

namespace {

// Returns exp(v - max) terms; the caller divides by their sum.
std::vector<double> softmax_terms(std::span<const double> v, double& sum) {
  const double top = *std::max_element(v.begin(), v.end());
  std::vector<double> e;
  e.reserve(v.size());
  sum = 0.0;
  for (double x : v) {
    e.push_back(std::exp(x - top));
    sum += e.back();
  }
  return e;
}

}  // namespace

Allocation allocate_weights(std::span<const double> slopes, double scale_f) {
  if (slopes.empty()) throw LengthMismatch("allocate_weights: no tasks");
  const auto m = static_cast<double>(slopes.size());
  double abs_sum = 0.0;
  for (double a : slopes) abs_sum += std::abs(a);

  Allocation out;
  out.normalized_slopes.reserve(slopes.size());
  for (double a : slopes) out.normalized_slopes.push_back(abs_sum > 0 ? m * a / abs_sum : 0.0);

  double sum = 0.0;
  auto e = softmax_terms(out.normalized_slopes, sum);
  out.scores.reserve(slopes.size());
  for (std::size_t i = 0; i < slopes.size(); ++i) out.scores.push_back(e[i] / sum * -out.normalized_slopes[i]);

  std::vector<double> scaled;
  scaled.reserve(slopes.size());
  for (double s : out.scores) scaled.push_back(scale_f * s);
  e = softmax_terms(scaled, sum);
  out.raw_weights.reserve(slopes.size());
  for (double x : e) out.raw_weights.push_back(m * x / sum);
  return out;
}

std::vector<double> smooth_weights(std::span<const double> previous, std::span<const double> raw, double ema_alpha) {
  if (previous.size() != raw.size())
    throw LengthMismatch("smooth_weights: " + std::to_string(previous.size()) + " previous vs " +
                         std::to_string(raw.size()) + " raw weights");
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = ema_alpha * previous[i] + (1.0 - ema_alpha) * raw[i];
  return out;
}

BalanceState::BalanceState(std::size_t task_count, ControllerParams params)
    : params_(params), windows_(task_count, LossWindow(params.window_h)), smoothed_(task_count, 1.0) {
  if (task_count == 0) throw EmptyTasks();
  if (params.window_h < 2) throw ValidationError("window_h", "must be >= 2");
  if (!(params.ema_alpha >= 0 && params.ema_alpha < 1)) throw ValidationError("ema_alpha", "must be in [0, 1)");
  if (!(params.eps > 0)) throw ValidationError("eps", "must be > 0");
  if (!(params.scale_f > 0)) throw ValidationError("scale_f", "must be > 0");
}

void BalanceState::record_segment(std::span<const double> losses) {
  if (losses.size() != windows_.size())
    throw LengthMismatch("record_segment: expected " + std::to_string(windows_.size()) + " losses");
  for (std::size_t i = 0; i < losses.size(); ++i) {
    if (!std::isfinite(losses[i])) throw NonFiniteLoss("validation loss of task " + std::to_string(i) + " is not finite");
    if (losses[i] < 0) throw ValidationError("val_loss", "validation losses must be >= 0");
  }
  for (std::size_t i = 0; i < losses.size(); ++i) windows_[i].push(losses[i]);
  ++segment_index_;
}

const std::vector<double>& BalanceState::step_weights() {
  degenerate_ = false;
  warning_.clear();
  if (segment_index_ <= params_.window_h) {
    std::fill(smoothed_.begin(), smoothed_.end(), 1.0);
    return smoothed_;
  }
  std::vector<SlopeFit> fits;
  std::vector<double> slopes;
  fits.reserve(windows_.size());
  for (std::size_t i = 0; i < windows_.size(); ++i) {
    try {
      fits.push_back(fit_slope(normalize_window(windows_[i].values(), params_.eps)));
    } catch (const DegenerateWindow& e) {
      degenerate_ = true;
      warning_ = "segment " + std::to_string(segment_index_) + ", task " + std::to_string(i) + ": " + e.what() +
                 "; keeping previous weights";
      return smoothed_;
    }
    slopes.push_back(fits.back().slope);
  }
  fits_ = std::move(fits);
  allocation_ = allocate_weights(slopes, params_.scale_f);
  smoothed_ = smooth_weights(smoothed_, allocation_.raw_weights, params_.ema_alpha);
  return smoothed_;
}

}  // namespace ombal::dynamic_balance
