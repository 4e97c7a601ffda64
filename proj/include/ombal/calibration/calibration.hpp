// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Static loss-weight calibration for step balance: each task is trained
// alone on a small subset until its loss settles at L*, and the weights are
// w_i = alpha * (1 / L*_i) / sum_j (1 / L*_j).

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ombal/core/config.hpp"
#include "ombal/core/metrics.hpp"
#include "ombal/core/rng.hpp"
#include "ombal/trainer/model.hpp"

namespace ombal::calibration {

struct CalibrationResult {
  std::vector<double> converged_losses;  // L*_i, task-declaration order
  std::vector<double> weights;           // w_i, sums to alpha_scale
  double alpha_scale = 0.0;
  double tol = 0.0;
  std::size_t patience = 0;
};

struct ConvergenceOptions {
  double subset_fraction = 0.1;
  double tol = 1e-3;
  std::size_t patience = 5;
  std::uint64_t max_steps = 10000;  // NonConvergence past this
  double eta = 0.01;
};

// Trains `task` alone on the first ceil(subset_fraction * pool) training
// samples, starting from `params` (a probe copy; the caller's parameters are
// not touched). After every step the loss over the whole subset is
// evaluated. Training stops once two consecutive windows of `patience`
// evaluations differ in mean by less than tol * L0, where L0 is the subset
// loss before the first step; L* is the mean of the latest window.
// Throws NonConvergence on a non-finite loss or when max_steps is reached.
double train_subset_to_convergence(trainer::TaskModel task, trainer::ParamSet params,
                                   const ConvergenceOptions& options, Rng rng);

// Throws NonPositiveLoss when some L* <= 0 (or is not finite).
std::vector<double> compute_weights(std::span<const double> converged_losses, double alpha_scale);

ConvergenceOptions convergence_options(const RunConfig& config, double eta);

// Calibrates every task in `task_indices`, probing from `params` with the
// given learning rate. Sub-streams "calibration" keyed by task index.
CalibrationResult calibrate(trainer::Model& model, std::span<const std::size_t> task_indices,
                            const trainer::ParamSet& params, const RunConfig& config, double eta, const Rng& root);

struct StepBalanceResult {
  CalibrationResult calibration;
  trainer::ParamSet initial_params;  // post-calibration reset point
  trainer::ParamSet params;          // after the main phase
};

// Main phase of step balance: per step one batch from every task, gradient
// w_i * grad L_i(B_i), one update with their fixed-order sum. Emits a train
// record per task per step on `sink`.
void run_step_balance(trainer::Model& model, std::span<const double> weights, std::uint64_t steps, double eta,
                      MetricsSink& sink, std::uint64_t first_step = 0, std::int64_t stage = 1);

// Both phases over every task of `config`, all groups trainable, config.eta,
// config.max_steps main-phase steps. Calibration results are emitted as
// weight_update records (loss = L*) at step 0.
StepBalanceResult run_calibrated_step_balance(const RunConfig& config, MetricsSink& sink);

}  // namespace ombal::calibration
