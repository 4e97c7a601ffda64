// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#include "ombal/trainer/objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ombal/error.hpp"
#include "ombal/kernels/kernels.hpp"

namespace ombal::trainer {

void Objective::check_batch(std::span<const std::size_t> batch) const {
  if (batch.empty()) throw IndexOutOfRange("empty batch");
  for (auto s : batch)
    if (s >= sample_count())
      throw IndexOutOfRange("sample index " + std::to_string(s) + " out of range (volume " +
                            std::to_string(sample_count()) + ")");
}

QuadraticObjective::QuadraticObjective(double curvature, std::size_t dim, std::vector<double> samples)
    : curvature_(curvature), dim_(dim), samples_(std::move(samples)), scratch_(dim) {
  if (dim_ == 0 || samples_.size() % dim_ != 0) throw LengthMismatch("quadratic samples do not match dim");
}

double QuadraticObjective::evaluate(std::span<const double> z, std::span<const std::size_t> batch,
                                    std::span<double> grad) {
  check_batch(batch);
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  double sq = 0.0;
  for (auto s : batch) sq += kernels::squared_distance(z, sample(s));
  if (!grad.empty()) {
    // grad = a (z - mean_s x_s)
    std::fill(scratch_.begin(), scratch_.end(), 0.0);
    for (auto s : batch) kernels::axpy(inv_b, sample(s), scratch_);
    for (std::size_t k = 0; k < dim_; ++k) grad[k] = curvature_ * (z[k] - scratch_[k]);
  }
  return 0.5 * curvature_ * sq * inv_b;
}

LogisticObjective::LogisticObjective(std::size_t dim, std::vector<double> features, std::vector<double> labels,
                                     std::vector<double> ground_truth)
    : dim_(dim), features_(std::move(features)), labels_(std::move(labels)), ground_truth_(std::move(ground_truth)) {
  if (dim_ == 0 || features_.size() != labels_.size() * dim_)
    throw LengthMismatch("logistic features do not match labels x dim");
}

namespace {

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

double LogisticObjective::evaluate(std::span<const double> z, std::span<const std::size_t> batch,
                                   std::span<double> grad) {
  check_batch(batch);
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);
  double total = 0.0;
  for (auto s : batch) {
    std::span<const double> x(features_.data() + s * dim_, dim_);
    const double y = labels_[s];
    const double margin = y * kernels::dot(z, x);
    total += softplus(-margin);
    // d/dz softplus(-y z.x) = -y sigmoid(-margin) x
    if (!grad.empty()) kernels::axpy(-y * sigmoid(-margin) * inv_b, x, grad);
  }
  return total * inv_b;
}

TraceObjective::TraceObjective(std::vector<double> losses, std::size_t dim, std::size_t sample_count)
    : losses_(std::move(losses)), dim_(dim), sample_count_(sample_count) {
  if (losses_.empty()) throw LengthMismatch("trace objective needs at least one loss");
}

double TraceObjective::evaluate(std::span<const double>, std::span<const std::size_t> batch,
                                std::span<double> grad) {
  check_batch(batch);
  if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);
  const double v = losses_[std::min(position_, losses_.size() - 1)];
  ++position_;
  return v;
}

std::unique_ptr<Objective> make_objective(const TaskSpec& task, Rng rng) {
  const auto n = static_cast<std::size_t>(task.volume);
  const auto d = static_cast<std::size_t>(task.dim);
  switch (task.loss_kind) {
    case LossKind::quadratic: {
      std::vector<double> samples(n * d);
      for (auto& x : samples) x = task.noise > 0 ? task.center + task.noise * rng.normal() : task.center;
      return std::make_unique<QuadraticObjective>(task.curvature, d, std::move(samples));
    }
    case LossKind::logistic: {
      std::vector<double> truth(d);
      for (auto& w : truth) w = rng.normal();
      std::vector<double> features(n * d);
      std::vector<double> labels(n);
      for (std::size_t s = 0; s < n; ++s) {
        double score = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const double x = task.feature_scale * rng.normal();
          features[s * d + k] = x;
          score += truth[k] * x;
        }
        double y = score >= 0 ? 1.0 : -1.0;
        if (rng.bernoulli(task.label_noise)) y = -y;
        labels[s] = y;
      }
      return std::make_unique<LogisticObjective>(d, std::move(features), std::move(labels), std::move(truth));
    }
    case LossKind::trace:
      return std::make_unique<TraceObjective>(task.trace, d, n);
  }
  throw ValidationError("loss_kind", "unsupported");
}

}  // namespace ombal::trainer
