// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#include "ombal/trainer/model.hpp"

#include <algorithm>
#include <numeric>

#include "ombal/error.hpp"
#include "ombal/kernels/kernels.hpp"

namespace ombal::trainer {

std::size_t ParamSet::index(std::string_view name) const {
  for (std::size_t i = 0; i < groups_.size(); ++i)
    if (groups_[i].name == name) return i;
  throw ValidationError("groups", "unknown parameter group '" + std::string(name) + "'");
}

TaskModel::TaskModel(TaskSpec spec, std::unique_ptr<Objective> objective, std::vector<std::size_t> groups,
                     std::vector<std::size_t> train_pool, std::vector<std::size_t> val_pool, Rng batch_rng)
    : spec_(std::move(spec)),
      objective_(std::move(objective)),
      groups_(std::move(groups)),
      train_pool_(std::move(train_pool)),
      val_pool_(std::move(val_pool)),
      cursor_(train_pool_, std::move(batch_rng)) {}

TaskModel::TaskModel(const TaskModel& o)
    : spec_(o.spec_),
      objective_(o.objective_->clone()),
      groups_(o.groups_),
      train_pool_(o.train_pool_),
      val_pool_(o.val_pool_),
      cursor_(o.cursor_) {}

TaskModel& TaskModel::operator=(const TaskModel& o) {
  if (this != &o) *this = TaskModel(o);
  return *this;
}

std::vector<double> TaskModel::effective_params(const ParamSet& params) const {
  std::vector<double> z(spec_.dim, 0.0);
  for (auto g : groups_) kernels::axpy(1.0, params.at(g).values, z);
  return z;
}

double TaskModel::validation_loss(const ParamSet& params) {
  const auto z = effective_params(params);
  const std::size_t b = spec_.val_batch;
  double total = 0.0;
  for (std::size_t step = 0; step < spec_.val_steps; ++step) {
    std::span<const std::size_t> batch(val_pool_.data() + step * b, b);
    total += objective_->evaluate(z, batch, {});
  }
  return total / static_cast<double>(spec_.val_steps);
}

Model build_model(const RunConfig& config, std::uint64_t seed) {
  const Rng root(seed);
  Model model;
  std::vector<ParamGroup> groups;
  if (config.groups.empty()) {
    for (const auto& t : config.tasks)
      groups.push_back(ParamGroup{t.id, std::vector<double>(t.dim, t.init), true, 1.0, false, 1.0});
  } else {
    for (const auto& g : config.groups)
      groups.push_back(ParamGroup{g.name, std::vector<double>(g.dim, g.init), true, g.lr_scale, g.encoder, g.lr_scale});
  }
  model.params = ParamSet(std::move(groups));

  for (std::size_t i = 0; i < config.tasks.size(); ++i) {
    const auto& t = config.tasks[i];
    std::vector<std::size_t> reads;
    if (config.groups.empty()) {
      reads.push_back(i);
    } else {
      for (const auto& name : t.groups) reads.push_back(model.params.index(name));
    }
    Rng data_rng = t.noise_seed ? Rng(*t.noise_seed) : root.substream("data", i);
    auto objective = make_objective(t, data_rng);

    std::vector<std::size_t> order(t.volume);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng split_rng = root.substream("split", i);
    split_rng.shuffle(std::span<std::size_t>(order));
    const auto reservoir = static_cast<std::ptrdiff_t>(t.val_reservoir());
    std::vector<std::size_t> val(order.begin(), order.begin() + reservoir);
    std::vector<std::size_t> train(order.begin() + reservoir, order.end());
    model.tasks.emplace_back(t, std::move(objective), std::move(reads), std::move(train), std::move(val),
                             root.substream("batch", i));
  }
  return model;
}

LossAndGrad loss_and_grad(TaskModel& task, const ParamSet& params, std::span<const std::size_t> batch) {
  const auto z = task.effective_params(params);
  std::vector<double> gz(z.size(), 0.0);
  LossAndGrad out;
  out.loss = task.objective().evaluate(z, batch, gz);
  out.grads.resize(params.size());
  for (auto g : task.groups())
    if (params.at(g).trainable) out.grads[g] = gz;
  return out;
}

void accumulate(GroupGradients& acc, const GroupGradients& g, double weight) {
  if (acc.size() < g.size()) acc.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i].empty()) continue;
    if (acc[i].empty()) acc[i].assign(g[i].size(), 0.0);
    kernels::axpy(weight, g[i], acc[i]);
  }
}

void sgd_step(ParamSet& params, const GroupGradients& grads, double eta) {
  for (std::size_t i = 0; i < params.size() && i < grads.size(); ++i) {
    auto& group = params.at(i);
    if (!group.trainable || grads[i].empty() || group.lr_scale == 0.0) continue;
    if (grads[i].size() != group.values.size())
      throw LengthMismatch("gradient for group '" + group.name + "' has the wrong size");
    kernels::axpy(-eta * group.lr_scale, grads[i], group.values);
  }
}

}  // namespace ombal::trainer
