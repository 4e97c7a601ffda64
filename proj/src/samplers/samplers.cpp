// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#include "ombal/samplers/samplers.hpp"

#include <algorithm>
#include <cmath>

#include "ombal/error.hpp"

namespace ombal::samplers {

namespace {

std::vector<double> checked_weights(std::vector<double> weights, std::size_t task_count) {
  if (weights.empty()) return std::vector<double>(task_count, 1.0);
  if (weights.size() != task_count) throw WeightLengthMismatch(weights.size(), task_count);
  for (double w : weights)
    if (!(std::isfinite(w) && w > 0)) throw ValidationError("weights", "must be finite and > 0");
  return weights;
}

}  // namespace

RandomProportional::RandomProportional(std::span<const std::uint64_t> volumes, Rng rng,
                                       std::vector<double> weights)
    : rng_(std::move(rng)) {
  if (volumes.empty()) throw EmptyTasks();
  std::uint64_t total = 0;
  for (auto v : volumes) {
    if (v == 0) throw ValidationError("volume", "must be >= 1");
    total += v;
    cumulative_.push_back(total);
  }
  weights_ = checked_weights(std::move(weights), volumes.size());
}

double RandomProportional::probability(std::size_t task) const {
  const auto lo = task == 0 ? 0 : cumulative_[task - 1];
  return static_cast<double>(cumulative_[task] - lo) / static_cast<double>(cumulative_.back());
}

StepPlan RandomProportional::next() {
  // Draw a sample uniformly from the pooled data; its owner is the task.
  const std::uint64_t r = rng_.below(cumulative_.back());
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
  const auto task = static_cast<std::size_t>(it - cumulative_.begin());
  return StepPlan{step_++, {{task, weights_[task]}}, Combine::single};
}

RoundRobin::RoundRobin(std::size_t task_count, std::vector<double> weights) : task_count_(task_count) {
  if (task_count == 0) throw EmptyTasks();
  weights_ = checked_weights(std::move(weights), task_count);
}

StepPlan RoundRobin::at(std::uint64_t step) const {
  const auto task = task_at(step, task_count_);
  return StepPlan{step, {{task, weights_[task]}}, Combine::single};
}

Accumulation::Accumulation(std::vector<std::string> task_ids, std::vector<double> weights)
    : task_ids_(std::move(task_ids)) {
  if (task_ids_.empty()) throw EmptyTasks();
  set_weights(std::move(weights));
}

void Accumulation::set_weights(std::vector<double> weights) {
  if (weights.size() != task_ids_.size()) throw WeightLengthMismatch(weights.size(), task_ids_.size());
  weights_ = checked_weights(std::move(weights), task_ids_.size());
}

StepPlan Accumulation::at(std::uint64_t step) const {
  StepPlan plan{step, {}, Combine::summed};
  plan.contributions.reserve(task_ids_.size());
  for (std::size_t i = 0; i < task_ids_.size(); ++i) plan.contributions.push_back({i, weights_[i]});
  return plan;
}

EpochCursor::EpochCursor(std::vector<std::size_t> pool, Rng rng) : order_(std::move(pool)), rng_(std::move(rng)) {
  if (order_.empty()) throw ValidationError("pool", "batch pool must be non-empty");
  reshuffle();
}

void EpochCursor::reshuffle() {
  rng_.shuffle(std::span<std::size_t>(order_));
  position_ = 0;
}

std::vector<std::size_t> EpochCursor::next_batch(std::size_t batch_size) {
  std::vector<std::size_t> batch;
  batch.reserve(batch_size);
  while (batch.size() < batch_size) {
    if (position_ == order_.size()) {
      ++epoch_;
      reshuffle();
    }
    batch.push_back(order_[position_++]);
  }
  return batch;
}

}  // namespace ombal::samplers
