// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Data-sample balance schedules: which task(s) feed each optimizer step and
// with what loss weight.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ombal/core/rng.hpp"

namespace ombal::samplers {

enum class Combine { single, summed };

struct Contribution {
  std::size_t task = 0;  // 0-based position in task-declaration order
  double weight = 1.0;

  bool operator==(const Contribution&) const = default;
};

// `single` plans carry one contribution; `summed` plans carry one per task
// in declaration order.
struct StepPlan {
  std::uint64_t step = 0;
  std::vector<Contribution> contributions;
  Combine combine = Combine::single;

  bool operator==(const StepPlan&) const = default;
};

// Picks task i with probability volume_i / sum(volumes), with replacement.
class RandomProportional {
 public:
  // `weights` are the static loss weights attached to each selection;
  // empty means all ones. Throws EmptyTasks, ValidationError,
  // WeightLengthMismatch.
  RandomProportional(std::span<const std::uint64_t> volumes, Rng rng, std::vector<double> weights = {});

  StepPlan next();
  double probability(std::size_t task) const;
  std::size_t task_count() const { return cumulative_.size(); }

 private:
  std::vector<std::uint64_t> cumulative_;
  std::vector<double> weights_;
  Rng rng_;
  std::uint64_t step_ = 0;
};

// Step t trains task t mod M.
class RoundRobin {
 public:
  explicit RoundRobin(std::size_t task_count, std::vector<double> weights = {});

  StepPlan next() { return at(step_++); }
  StepPlan at(std::uint64_t step) const;
  static std::size_t task_at(std::uint64_t step, std::size_t task_count) {
    return static_cast<std::size_t>(step % task_count);
  }

 private:
  std::size_t task_count_;
  std::vector<double> weights_;
  std::uint64_t step_ = 0;
};

// One batch per task per step, combined as sum_i w_i * grad_i.
class Accumulation {
 public:
  // Throws EmptyTasks, WeightLengthMismatch, ValidationError (w_i <= 0).
  Accumulation(std::vector<std::string> task_ids, std::vector<double> weights);

  StepPlan next() { return at(step_++); }
  StepPlan at(std::uint64_t step) const;
  const std::vector<std::string>& task_ids() const { return task_ids_; }
  const std::vector<double>& weights() const { return weights_; }
  // Controllers that adapt weights between steps replace them here.
  void set_weights(std::vector<double> weights);

 private:
  std::vector<std::string> task_ids_;
  std::vector<double> weights_;
  std::uint64_t step_ = 0;
};

// Without-replacement batches over a fixed index pool, reshuffled at every
// epoch boundary. Batches may straddle epochs.
class EpochCursor {
 public:
  EpochCursor(std::vector<std::size_t> pool, Rng rng);

  std::vector<std::size_t> next_batch(std::size_t batch_size);
  std::uint64_t epoch() const { return epoch_; }
  std::size_t pool_size() const { return order_.size(); }

 private:
  void reshuffle();

  std::vector<std::size_t> order_;
  Rng rng_;
  std::size_t position_ = 0;
  std::uint64_t epoch_ = 0;
};

}  // namespace ombal::samplers
