// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Multi-stage training loop. A stage fixes its trainable groups, learning
// rates, step budget, balance strategy and pure-text budget; parameters carry
// over between stages while sampler, calibration and controller state start
// fresh.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ombal/calibration/calibration.hpp"
#include "ombal/core/config.hpp"
#include "ombal/core/metrics.hpp"
#include "ombal/trainer/model.hpp"

namespace ombal::trainer {

// Command-line overrides applied to every stage.
struct TrainOptions {
  std::optional<Strategy> strategy;
  std::optional<std::uint64_t> max_steps;
  std::optional<WeightSetting> weights;
};

struct ResolvedStage {
  std::int64_t id = 1;
  std::vector<bool> trainable;        // per parameter group
  std::vector<std::size_t> tasks;     // balanced tasks, declaration order
  std::optional<std::size_t> text_task;
  double lr = 0.0;
  std::optional<double> lr_encoders;
  std::uint64_t steps = 0;
  Strategy strategy = Strategy::accumulation;
  double text_ratio = 0.0;
  WeightSetting weights;
};

struct StagePlan {
  std::vector<ResolvedStage> stages;
};

// Throws ValidationError for strategy/weight combinations that do not apply.
StagePlan make_stage_plan(const RunConfig& config, const Model& model, const TrainOptions& options);

// Step k (0-based within a stage) is a pure-text step when floor((k+1) r)
// exceeds floor(k r): evenly spaced, floor(N r) of the first N steps.
bool is_text_step(std::uint64_t k, double ratio);

struct StageOutcome {
  std::int64_t stage = 0;
  std::uint64_t steps = 0;
  std::uint64_t text_steps = 0;
  std::vector<double> static_weights;  // per balanced task; empty for dynamic
  std::optional<calibration::CalibrationResult> calibration;
  std::vector<std::vector<double>> weight_schedule;  // dynamic: one entry per segment
};

struct TrainResult {
  ParamSet params;
  std::vector<double> initial_val_losses;  // every task, declaration order
  std::vector<double> final_val_losses;
  std::vector<StageOutcome> stages;
};

using WarningHandler = std::function<void(const std::string&)>;

class Trainer {
 public:
  Trainer(const RunConfig& config, TrainOptions options, MetricsSink& sink, WarningHandler warn = {});

  TrainResult run();
  StageOutcome run_stage(const ResolvedStage& stage);

  Model& model() { return model_; }
  const StagePlan& plan() const { return plan_; }
  std::uint64_t global_step() const { return global_step_; }

 private:
  std::vector<double> static_weights(const ResolvedStage& stage, StageOutcome& outcome);
  void apply_stage_groups(const ResolvedStage& stage);

  RunConfig config_;
  TrainOptions options_;
  MetricsSink& sink_;
  WarningHandler warn_;
  Model model_;
  StagePlan plan_;
  std::uint64_t global_step_ = 0;
};

}  // namespace ombal::trainer
