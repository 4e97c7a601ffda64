// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Parameter groups and task bindings of the toy multi-task model.
//
// A task reads one or more groups; its effective parameter vector is the
// element-wise sum of those groups, so a gradient with respect to it is
// also the gradient with respect to each group it reads.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ombal/core/config.hpp"
#include "ombal/core/rng.hpp"
#include "ombal/samplers/samplers.hpp"
#include "ombal/trainer/objective.hpp"

namespace ombal::trainer {

struct ParamGroup {
  std::string name;
  std::vector<double> values;
  bool trainable = true;
  double lr_scale = 1.0;
  bool encoder = false;
  double base_lr_scale = 1.0;  // configured value; lr_scale is stage-adjusted

  bool operator==(const ParamGroup&) const = default;
};

class ParamSet {
 public:
  ParamSet() = default;
  explicit ParamSet(std::vector<ParamGroup> groups) : groups_(std::move(groups)) {}

  std::vector<ParamGroup>& groups() { return groups_; }
  const std::vector<ParamGroup>& groups() const { return groups_; }
  ParamGroup& at(std::size_t i) { return groups_.at(i); }
  const ParamGroup& at(std::size_t i) const { return groups_.at(i); }
  std::size_t size() const { return groups_.size(); }
  // Throws ValidationError for unknown names.
  std::size_t index(std::string_view name) const;

  bool operator==(const ParamSet&) const = default;

 private:
  std::vector<ParamGroup> groups_;
};

// One gradient per group, aligned with ParamSet::groups(); an empty vector
// means "no gradient" (group not read by the task, or frozen).
using GroupGradients = std::vector<std::vector<double>>;

struct LossAndGrad {
  double loss = 0.0;
  GroupGradients grads;
};

class TaskModel {
 public:
  TaskModel(TaskSpec spec, std::unique_ptr<Objective> objective, std::vector<std::size_t> groups,
            std::vector<std::size_t> train_pool, std::vector<std::size_t> val_pool, Rng batch_rng);
  TaskModel(const TaskModel& other);
  TaskModel& operator=(const TaskModel& other);
  TaskModel(TaskModel&&) noexcept = default;
  TaskModel& operator=(TaskModel&&) noexcept = default;

  const TaskSpec& spec() const { return spec_; }
  const std::string& id() const { return spec_.id; }
  Objective& objective() { return *objective_; }
  const Objective& objective() const { return *objective_; }
  const std::vector<std::size_t>& groups() const { return groups_; }
  const std::vector<std::size_t>& train_pool() const { return train_pool_; }
  const std::vector<std::size_t>& val_pool() const { return val_pool_; }

  std::vector<std::size_t> next_train_batch() { return cursor_.next_batch(spec_.train_batch); }
  // Mean of the per-batch mean losses over val_steps batches of val_batch,
  // covering the whole held-out reservoir.
  double validation_loss(const ParamSet& params);

  // Sum of the groups this task reads.
  std::vector<double> effective_params(const ParamSet& params) const;

 private:
  TaskSpec spec_;
  std::unique_ptr<Objective> objective_;
  std::vector<std::size_t> groups_;
  std::vector<std::size_t> train_pool_;
  std::vector<std::size_t> val_pool_;
  samplers::EpochCursor cursor_;
};

struct Model {
  ParamSet params;
  std::vector<TaskModel> tasks;
};

// Groups, data sets, train/validation splits and batch cursors, all derived
// from `seed` (sub-streams "data", "split" and "batch", keyed by task index).
Model build_model(const RunConfig& config, std::uint64_t seed);

// Exact loss and gradient for `batch`; frozen and unread groups get empty
// gradients. Throws IndexOutOfRange.
LossAndGrad loss_and_grad(TaskModel& task, const ParamSet& params, std::span<const std::size_t> batch);

// acc += weight * g, group by group (fixed order).
void accumulate(GroupGradients& acc, const GroupGradients& g, double weight);

// theta_g -= eta * lr_scale_g * grad_g for trainable groups.
void sgd_step(ParamSet& params, const GroupGradients& grads, double eta);

}  // namespace ombal::trainer
