// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Validation-slope loss-weight controller.
//
// At every validation segment each task's mean held-out loss is appended to
// a window of the last H values. After H segments of all-ones warm-up, each
// window is normalized, fitted with a least-squares line, and the slopes are
// mapped to weights:
//
//   a~_i = M a_i / sum_j |a_j|
//   s_i  = softmax(a~)_i * (-a~_i)
//   w_i  = M softmax(f s)_i
//   w^_i = ema * w^_i(prev) + (1 - ema) w_i
//
// Steeper descent earns a larger weight; flat or rising curves lose weight.

#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <vector>

namespace ombal::dynamic_balance {

// Ring buffer of the last `capacity` validation losses, oldest first.
class LossWindow {
 public:
  explicit LossWindow(std::size_t capacity) : capacity_(capacity) {}

  void push(double loss);
  std::size_t size() const { return values_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool full() const { return values_.size() == capacity_; }
  std::vector<double> values() const { return {values_.begin(), values_.end()}; }

 private:
  std::size_t capacity_;
  std::deque<double> values_;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> normalized_losses;
};

// (L - lo) / (max - lo) with lo = min(window min, eps), clamped to [0, 1].
// Throws DegenerateWindow when max <= eps.
std::vector<double> normalize_window(std::span<const double> history, double eps);

// Ordinary least squares over x = 0 .. n-1 (oldest to newest). n >= 2.
SlopeFit fit_slope(std::span<const double> normalized);

struct Allocation {
  std::vector<double> normalized_slopes;
  std::vector<double> scores;
  std::vector<double> raw_weights;
};

// All-zero slopes give a~ = 0 and therefore uniform weights.
Allocation allocate_weights(std::span<const double> slopes, double scale_f);

// Element-wise EMA. Throws LengthMismatch.
std::vector<double> smooth_weights(std::span<const double> previous, std::span<const double> raw, double ema_alpha);

struct ControllerParams {
  std::size_t window_h = 5;
  double scale_f = 1.0;
  double ema_alpha = 0.9;
  double eps = 1e-6;
};

class BalanceState {
 public:
  BalanceState(std::size_t task_count, ControllerParams params);

  // Appends one validation loss per task. Throws NonFiniteLoss,
  // LengthMismatch, ValidationError (negative loss).
  void record_segment(std::span<const double> losses);

  // Weights for the training steps up to the next segment. All ones through
  // segment H. A degenerate window keeps the previous weights and sets
  // last_update_degenerate().
  const std::vector<double>& step_weights();

  std::size_t task_count() const { return windows_.size(); }
  std::uint64_t segment_index() const { return segment_index_; }
  const std::vector<LossWindow>& windows() const { return windows_; }
  const std::vector<SlopeFit>& fits() const { return fits_; }
  const std::vector<double>& normalized_slopes() const { return allocation_.normalized_slopes; }
  const std::vector<double>& scores() const { return allocation_.scores; }
  const std::vector<double>& raw_weights() const { return allocation_.raw_weights; }
  const std::vector<double>& smoothed_weights() const { return smoothed_; }
  bool last_update_degenerate() const { return degenerate_; }
  const std::string& last_warning() const { return warning_; }
  const ControllerParams& params() const { return params_; }

 private:
  ControllerParams params_;
  std::vector<LossWindow> windows_;
  std::vector<SlopeFit> fits_;
  Allocation allocation_;
  std::vector<double> smoothed_;
  std::uint64_t segment_index_ = 0;
  bool degenerate_ = false;
  std::string warning_;
};

}  // namespace ombal::dynamic_balance
