// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#include "ombal/calibration/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ombal/error.hpp"
#include "ombal/samplers/samplers.hpp"

namespace ombal::calibration {

namespace {

double mean(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

}  // namespace

double train_subset_to_convergence(trainer::TaskModel task, trainer::ParamSet params,
                                   const ConvergenceOptions& opt, Rng rng) {
  if (!(opt.subset_fraction > 0 && opt.subset_fraction <= 1))
    throw ValidationError("subset_fraction", "must be in (0, 1]");
  if (!(opt.tol > 0)) throw ValidationError("calib_tol", "must be > 0");
  if (opt.patience < 1) throw ValidationError("calib_patience", "must be >= 1");

  const auto& pool = task.train_pool();
  const std::size_t batch_size = task.spec().train_batch;
  auto subset_size = static_cast<std::size_t>(std::ceil(opt.subset_fraction * static_cast<double>(pool.size())));
  subset_size = std::clamp(subset_size, std::min(batch_size, pool.size()), pool.size());
  std::vector<std::size_t> subset(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(subset_size));
  samplers::EpochCursor cursor(subset, std::move(rng));

  auto subset_loss = [&] {
    return task.objective().evaluate(task.effective_params(params), subset, {});
  };

  const double initial = subset_loss();
  if (!std::isfinite(initial)) throw NonConvergence("task '" + task.id() + "': non-finite initial loss");
  const double threshold = opt.tol * std::max(initial, std::numeric_limits<double>::min());
  const std::size_t p = opt.patience;

  std::vector<double> history;
  for (std::uint64_t step = 0; step < opt.max_steps; ++step) {
    const auto batch = cursor.next_batch(batch_size);
    const auto lg = trainer::loss_and_grad(task, params, batch);
    trainer::sgd_step(params, lg.grads, opt.eta);
    const double loss = subset_loss();
    if (!std::isfinite(loss))
      throw NonConvergence("task '" + task.id() + "' diverged at calibration step " + std::to_string(step + 1));
    history.push_back(loss);
    if (history.size() >= 2 * p) {
      std::span<const double> h(history);
      const double current = mean(h.last(p));
      const double previous = mean(h.subspan(h.size() - 2 * p, p));
      if (std::abs(previous - current) < threshold && current <= initial) return current;
    }
  }
  throw NonConvergence("task '" + task.id() + "' did not converge within " + std::to_string(opt.max_steps) +
                       " calibration steps");
}

std::vector<double> compute_weights(std::span<const double> losses, double alpha_scale) {
  if (losses.empty()) throw EmptyTasks();
  if (!(alpha_scale > 0)) throw ValidationError("alpha_scale", "must be > 0");
  std::vector<double> inverse;
  inverse.reserve(losses.size());
  for (std::size_t i = 0; i < losses.size(); ++i) {
    if (!(std::isfinite(losses[i]) && losses[i] > 0))
      throw NonPositiveLoss("converged loss of task " + std::to_string(i) + " is not positive");
    inverse.push_back(1.0 / losses[i]);
  }
  const double total = std::accumulate(inverse.begin(), inverse.end(), 0.0);
  std::vector<double> weights;
  weights.reserve(losses.size());
  for (double inv : inverse) weights.push_back(alpha_scale * inv / total);
  return weights;
}

ConvergenceOptions convergence_options(const RunConfig& c, double eta) {
  return ConvergenceOptions{c.subset_fraction, c.calib_tol, static_cast<std::size_t>(c.calib_patience),
                            c.max_calib_steps, eta};
}

CalibrationResult calibrate(trainer::Model& model, std::span<const std::size_t> task_indices,
                            const trainer::ParamSet& params, const RunConfig& config, double eta, const Rng& root) {
  CalibrationResult result;
  result.alpha_scale = config.alpha_scale;
  result.tol = config.calib_tol;
  result.patience = static_cast<std::size_t>(config.calib_patience);
  const auto options = convergence_options(config, eta);
  for (auto i : task_indices)
    result.converged_losses.push_back(
        train_subset_to_convergence(model.tasks.at(i), params, options, root.substream("calibration", i)));
  result.weights = compute_weights(result.converged_losses, config.alpha_scale);
  return result;
}

void run_step_balance(trainer::Model& model, std::span<const double> weights, std::uint64_t steps, double eta,
                      MetricsSink& sink, std::uint64_t first_step, std::int64_t stage) {
  if (weights.size() != model.tasks.size()) throw WeightLengthMismatch(weights.size(), model.tasks.size());
  for (std::uint64_t t = 0; t < steps; ++t) {
    trainer::GroupGradients total;
    for (std::size_t i = 0; i < model.tasks.size(); ++i) {
      auto& task = model.tasks[i];
      const auto batch = task.next_train_batch();
      const auto lg = trainer::loss_and_grad(task, model.params, batch);
      if (!std::isfinite(lg.loss))
        throw TrainingError("non-finite loss on task '" + task.id() + "' at step " + std::to_string(first_step + t));
      trainer::accumulate(total, lg.grads, weights[i]);
      sink.emit({first_step + t, stage, task.id(), lg.loss, weights[i], RecordKind::train});
    }
    trainer::sgd_step(model.params, total, eta);
  }
}

StepBalanceResult run_calibrated_step_balance(const RunConfig& config, MetricsSink& sink) {
  auto model = trainer::build_model(config, config.seed);
  std::vector<std::size_t> all(model.tasks.size());
  std::iota(all.begin(), all.end(), std::size_t{0});

  StepBalanceResult out;
  out.calibration = calibrate(model, all, model.params, config, config.eta, Rng(config.seed));
  for (std::size_t i = 0; i < all.size(); ++i)
    sink.emit({0, 1, model.tasks[i].id(), out.calibration.converged_losses[i], out.calibration.weights[i],
               RecordKind::weight_update});

  // Probes ran on copies, so model.params is still the initialization.
  out.initial_params = model.params;
  run_step_balance(model, out.calibration.weights, config.max_steps, config.eta, sink);
  out.params = model.params;
  return out;
}

}  // namespace ombal::calibration
