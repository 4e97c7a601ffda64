// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Synthetic per-task objectives standing in for opaque modality losses.
// Every objective reports the mean loss over a batch of sample indices and
// its exact gradient with respect to the effective parameter vector.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ombal/core/config.hpp"
#include "ombal/core/rng.hpp"

namespace ombal::trainer {

class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dim() const = 0;
  virtual std::size_t sample_count() const = 0;

  // Mean loss over `batch` at `z`. When `grad` is non-empty it receives the
  // gradient (size dim()). Throws IndexOutOfRange for indices past
  // sample_count().
  virtual double evaluate(std::span<const double> z, std::span<const std::size_t> batch,
                          std::span<double> grad) = 0;

  virtual std::unique_ptr<Objective> clone() const = 0;

 protected:
  void check_batch(std::span<const std::size_t> batch) const;
};

// 1/|B| sum_s 1/2 a ||z - x_s||^2, x_s drawn around a common center.
class QuadraticObjective final : public Objective {
 public:
  // `samples` is row-major, sample_count x dim.
  QuadraticObjective(double curvature, std::size_t dim, std::vector<double> samples);

  std::size_t dim() const override { return dim_; }
  std::size_t sample_count() const override { return samples_.size() / dim_; }
  double evaluate(std::span<const double> z, std::span<const std::size_t> batch, std::span<double> grad) override;
  std::unique_ptr<Objective> clone() const override { return std::make_unique<QuadraticObjective>(*this); }

  double curvature() const { return curvature_; }
  std::span<const double> sample(std::size_t s) const { return {samples_.data() + s * dim_, dim_}; }

 private:
  double curvature_;
  std::size_t dim_;
  std::vector<double> samples_;
  std::vector<double> scratch_;
};

// Mean logistic loss log(1 + exp(-y <z, x>)), labels y in {-1, +1}.
class LogisticObjective final : public Objective {
 public:
  LogisticObjective(std::size_t dim, std::vector<double> features, std::vector<double> labels,
                    std::vector<double> ground_truth = {});

  std::size_t dim() const override { return dim_; }
  std::size_t sample_count() const override { return labels_.size(); }
  double evaluate(std::span<const double> z, std::span<const std::size_t> batch, std::span<double> grad) override;
  std::unique_ptr<Objective> clone() const override { return std::make_unique<LogisticObjective>(*this); }

  const std::vector<double>& ground_truth() const { return ground_truth_; }

 private:
  std::size_t dim_;
  std::vector<double> features_;
  std::vector<double> labels_;
  std::vector<double> ground_truth_;
};

// Replays a recorded loss sequence, one entry per evaluation, holding the
// last value once exhausted. Parameter-independent: the gradient is zero.
class TraceObjective final : public Objective {
 public:
  TraceObjective(std::vector<double> losses, std::size_t dim, std::size_t sample_count);

  std::size_t dim() const override { return dim_; }
  std::size_t sample_count() const override { return sample_count_; }
  double evaluate(std::span<const double> z, std::span<const std::size_t> batch, std::span<double> grad) override;
  std::unique_ptr<Objective> clone() const override { return std::make_unique<TraceObjective>(*this); }

  std::size_t position() const { return position_; }

 private:
  std::vector<double> losses_;
  std::size_t dim_;
  std::size_t sample_count_;
  std::size_t position_ = 0;
};

// Generates the task's synthetic data set (`volume` samples) from `rng`.
std::unique_ptr<Objective> make_objective(const TaskSpec& task, Rng rng);

}  // namespace ombal::trainer
