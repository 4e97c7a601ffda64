// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#include "ombal/trainer/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "ombal/dynamic_balance/controller.hpp"
#include "ombal/error.hpp"
#include "ombal/samplers/samplers.hpp"

namespace ombal::trainer {

bool is_text_step(std::uint64_t k, double ratio) {
  if (ratio <= 0) return false;
  const auto d = static_cast<double>(k);
  return std::floor((d + 1.0) * ratio) > std::floor(d * ratio);
}

namespace {

std::uint64_t batches_per_epoch(const TaskModel& t) {
  const auto pool = t.train_pool().size();
  const auto b = t.spec().train_batch;
  return (pool + b - 1) / b;
}

std::uint64_t epoch_steps(const ResolvedStage& s, const Model& model) {
  std::uint64_t regular = 0;
  const bool summed = s.strategy == Strategy::accumulation || s.strategy == Strategy::uniform ||
                      s.strategy == Strategy::dynamic;
  for (auto i : s.tasks) {
    const auto n = batches_per_epoch(model.tasks[i]);
    regular = summed ? std::max(regular, n) : regular + n;
  }
  if (!s.text_task || s.text_ratio <= 0) return regular;
  if (s.text_ratio >= 1) return batches_per_epoch(model.tasks[*s.text_task]);
  return static_cast<std::uint64_t>(std::ceil(static_cast<double>(regular) / (1.0 - s.text_ratio)));
}

}  // namespace

StagePlan make_stage_plan(const RunConfig& config, const Model& model, const TrainOptions& options) {
  std::vector<StageSpec> entries = config.stages;
  if (entries.empty()) {
    StageSpec s;
    s.id = 1;
    s.max_steps = config.max_steps;
    entries.push_back(s);
  }
  StagePlan plan;
  for (const auto& entry : entries) {
    const std::string field = "stage." + std::to_string(entry.id);
    ResolvedStage s;
    s.id = entry.id;
    s.strategy = options.strategy.value_or(entry.strategy.value_or(config.strategy));
    s.lr = entry.lr.value_or(config.eta);
    s.lr_encoders = entry.lr_encoders;
    s.text_ratio = entry.text_ratio.value_or(config.text_ratio);
    s.weights = options.weights.value_or(entry.weights);

    s.trainable.assign(model.params.size(), entry.trainable.empty());
    for (const auto& g : entry.trainable) s.trainable[model.params.index(g)] = true;

    for (std::size_t i = 0; i < model.tasks.size(); ++i) {
      const auto& id = model.tasks[i].id();
      const bool in_stage = entry.tasks.empty() || std::find(entry.tasks.begin(), entry.tasks.end(), id) != entry.tasks.end();
      if (!in_stage) continue;
      if (id == config.text_task) s.text_task = i;
      else s.tasks.push_back(i);
    }
    if (s.tasks.empty()) throw ValidationError(field + ".tasks", "needs at least one non-text task");

    const auto mode = s.weights.mode;
    if (s.strategy == Strategy::uniform && mode != WeightMode::automatic && mode != WeightMode::uniform)
      throw ValidationError(field + ".weights", "the uniform strategy pins every weight to 1");
    if (s.strategy == Strategy::dynamic && mode != WeightMode::automatic && mode != WeightMode::uniform)
      throw ValidationError(field + ".weights", "the dynamic strategy starts from all-ones weights");
    if (mode == WeightMode::fixed && s.weights.values.size() != s.tasks.size())
      throw WeightLengthMismatch(s.weights.values.size(), s.tasks.size());

    if (options.max_steps) s.steps = *options.max_steps;
    else if (entry.max_steps) s.steps = *entry.max_steps;
    else s.steps = entry.epochs.value_or(1) * epoch_steps(s, model);
    plan.stages.push_back(std::move(s));
  }
  return plan;
}

Trainer::Trainer(const RunConfig& config, TrainOptions options, MetricsSink& sink, WarningHandler warn)
    : config_(config),
      options_(std::move(options)),
      sink_(sink),
      warn_(std::move(warn)),
      model_(build_model(config, config.seed)) {
  if (!warn_) warn_ = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
  plan_ = make_stage_plan(config_, model_, options_);
}

void Trainer::apply_stage_groups(const ResolvedStage& stage) {
  for (std::size_t g = 0; g < model_.params.size(); ++g) {
    auto& group = model_.params.at(g);
    group.trainable = stage.trainable[g];
    group.lr_scale = group.base_lr_scale;
    if (group.encoder && stage.lr_encoders) group.lr_scale *= *stage.lr_encoders / stage.lr;
  }
}

std::vector<double> Trainer::static_weights(const ResolvedStage& stage, StageOutcome& outcome) {
  const std::size_t m = stage.tasks.size();
  WeightMode mode = stage.weights.mode;
  if (mode == WeightMode::automatic)
    mode = stage.strategy == Strategy::accumulation ? WeightMode::calibrated : WeightMode::uniform;
  if (stage.strategy == Strategy::uniform || stage.strategy == Strategy::dynamic) mode = WeightMode::uniform;

  switch (mode) {
    case WeightMode::fixed: return stage.weights.values;
    case WeightMode::calibrated: {
      const Rng root = Rng(config_.seed).substream("stage-calibration", static_cast<std::uint64_t>(stage.id));
      auto result = calibration::calibrate(model_, stage.tasks, model_.params, config_, stage.lr, root);
      for (std::size_t k = 0; k < m; ++k)
        sink_.emit({global_step_, stage.id, model_.tasks[stage.tasks[k]].id(), result.converged_losses[k],
                    result.weights[k], RecordKind::weight_update});
      auto w = result.weights;
      outcome.calibration = std::move(result);
      return w;
    }
    default: return std::vector<double>(m, 1.0);
  }
}

StageOutcome Trainer::run_stage(const ResolvedStage& stage) {
  StageOutcome outcome;
  outcome.stage = stage.id;
  outcome.steps = stage.steps;
  if (stage.steps == 0) return outcome;

  apply_stage_groups(stage);
  const std::size_t m = stage.tasks.size();
  std::vector<double> weights = static_weights(stage, outcome);
  if (stage.strategy != Strategy::dynamic) outcome.static_weights = weights;

  std::vector<std::string> ids;
  std::vector<std::uint64_t> volumes;
  for (auto i : stage.tasks) {
    ids.push_back(model_.tasks[i].id());
    volumes.push_back(model_.tasks[i].spec().volume);
  }
  const Rng stage_rng = Rng(config_.seed).substream("stage", static_cast<std::uint64_t>(stage.id));
  std::optional<samplers::RandomProportional> random;
  std::optional<samplers::RoundRobin> round_robin;
  std::optional<samplers::Accumulation> summed;
  switch (stage.strategy) {
    case Strategy::random: random.emplace(volumes, stage_rng.substream("random"), weights); break;
    case Strategy::round_robin: round_robin.emplace(m, weights); break;
    default: summed.emplace(ids, weights); break;
  }
  std::optional<dynamic_balance::BalanceState> controller;
  if (stage.strategy == Strategy::dynamic)
    controller.emplace(m, dynamic_balance::ControllerParams{static_cast<std::size_t>(config_.window_h),
                                                            config_.scale_f, config_.ema_alpha, config_.eps});

  auto validation_segment = [&] {
    std::vector<double> losses;
    for (std::size_t k = 0; k < m; ++k) {
      auto& task = model_.tasks[stage.tasks[k]];
      losses.push_back(task.validation_loss(model_.params));
      if (!std::isfinite(losses.back()))
        throw TrainingError("non-finite validation loss on task '" + task.id() + "' at step " +
                            std::to_string(global_step_));
      sink_.emit({global_step_, stage.id, task.id(), losses.back(), weights[k], RecordKind::val});
    }
    if (controller) {
      controller->record_segment(losses);
      weights = controller->step_weights();
      if (controller->last_update_degenerate()) warn_(controller->last_warning());
      summed->set_weights(weights);
      outcome.weight_schedule.push_back(weights);
      for (std::size_t k = 0; k < m; ++k)
        sink_.emit({global_step_, stage.id, ids[k], losses[k], weights[k], RecordKind::weight_update});
    }
    sink_.flush();
  };

  for (std::uint64_t k = 0; k < stage.steps; ++k) {
    samplers::StepPlan plan;
    if (stage.text_task && is_text_step(k, stage.text_ratio)) {
      plan = samplers::StepPlan{k, {{*stage.text_task, 1.0}}, samplers::Combine::single};
      ++outcome.text_steps;
    } else {
      plan = random ? random->next() : round_robin ? round_robin->next() : summed->next();
      for (auto& c : plan.contributions) c.task = stage.tasks[c.task];
    }

    GroupGradients total;
    for (const auto& c : plan.contributions) {
      auto& task = model_.tasks[c.task];
      const auto batch = task.next_train_batch();
      const auto lg = loss_and_grad(task, model_.params, batch);
      if (!std::isfinite(lg.loss))
        throw TrainingError("non-finite loss on task '" + task.id() + "' at step " + std::to_string(global_step_));
      accumulate(total, lg.grads, c.weight);
      sink_.emit({global_step_, stage.id, task.id(), lg.loss, c.weight, RecordKind::train});
    }
    sgd_step(model_.params, total, stage.lr);
    ++global_step_;
    if ((k + 1) % config_.val_interval == 0) validation_segment();
  }
  sink_.flush();
  return outcome;
}

TrainResult Trainer::run() {
  TrainResult result;
  for (auto& task : model_.tasks) result.initial_val_losses.push_back(task.validation_loss(model_.params));
  for (const auto& stage : plan_.stages) result.stages.push_back(run_stage(stage));
  for (auto& task : model_.tasks) result.final_val_losses.push_back(task.validation_loss(model_.params));
  result.params = model_.params;
  return result;
}

}  // namespace ombal::trainer
