// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#include "ombal/cli/ablation.hpp"

#include <algorithm>
#include <cstdio>

#include "ombal/core/metrics.hpp"
#include "ombal/trainer/trainer.hpp"

namespace ombal::cli {

namespace {

std::string ones_label(std::size_t m) {
  std::string s = "[";
  for (std::size_t i = 0; i < m; ++i) s += i ? ",1" : "1";
  return s + "]";
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<AblationCell> step_balance_cells(std::size_t m) {
  const WeightSetting uniform{WeightMode::uniform, {}};
  return {
      {Strategy::random, uniform, ones_label(m)},
      {Strategy::round_robin, uniform, ones_label(m)},
      {Strategy::accumulation, uniform, ones_label(m)},
      {Strategy::accumulation, WeightSetting{WeightMode::calibrated, {}}, "calibrated"},
  };
}

std::vector<AblationCell> dynamic_balance_cells(std::size_t m) {
  return {
      {Strategy::uniform, WeightSetting{}, ones_label(m)},
      {Strategy::dynamic, WeightSetting{}, "dynamic"},
  };
}

RunConfig apply_cell(RunConfig config, const AblationCell& cell, std::optional<std::uint64_t> max_steps) {
  config.strategy = cell.strategy;
  if (max_steps) config.max_steps = *max_steps;
  for (auto& s : config.stages) {
    s.strategy = cell.strategy;
    s.weights = cell.weights;
    if (max_steps) {
      s.epochs.reset();
      s.max_steps = *max_steps;
    }
  }
  if (config.stages.empty() && cell.weights.mode != WeightMode::automatic) {
    StageSpec s;
    s.max_steps = config.max_steps;
    s.strategy = cell.strategy;
    s.weights = cell.weights;
    config.stages.push_back(s);
  }
  return config;
}

AblationRow run_cell(const RunConfig& base, const AblationCell& cell, std::uint64_t seed,
                     std::optional<std::uint64_t> max_steps) {
  RunConfig config = apply_cell(base, cell, max_steps);
  config.seed = seed;
  NullSink sink;
  trainer::Trainer trainer(config, {}, sink, [](const std::string&) {});
  const auto result = trainer.run();

  AblationRow row;
  row.seed = std::to_string(seed);
  row.strategy = std::string(to_string(cell.strategy));
  row.weights = cell.weights_label;
  row.final_losses = result.final_val_losses;
  double sum = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < result.final_val_losses.size(); ++i) {
    const double init = result.initial_val_losses[i];
    const double ratio = init > 0 ? result.final_val_losses[i] / init : result.final_val_losses[i];
    sum += ratio;
    worst = std::max(worst, ratio);
  }
  row.balanced_metric = sum / static_cast<double>(result.final_val_losses.size());
  row.worst_task = worst;
  return row;
}

std::vector<AblationRow> run_ablation(const RunConfig& config, std::span<const AblationCell> cells,
                                      std::span<const std::uint64_t> seeds, std::optional<std::uint64_t> max_steps) {
  std::vector<AblationRow> rows;
  for (auto seed : seeds)
    for (const auto& cell : cells) rows.push_back(run_cell(config, cell, seed, max_steps));
  if (seeds.empty()) return rows;

  const double n = static_cast<double>(seeds.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    AblationRow mean;
    mean.seed = "mean";
    mean.strategy = std::string(to_string(cells[c].strategy));
    mean.weights = cells[c].weights_label;
    mean.final_losses.assign(config.tasks.size(), 0.0);
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const auto& r = rows[s * cells.size() + c];
      for (std::size_t i = 0; i < r.final_losses.size(); ++i) mean.final_losses[i] += r.final_losses[i] / n;
      mean.balanced_metric += r.balanced_metric / n;
      mean.worst_task += r.worst_task / n;
    }
    rows.push_back(std::move(mean));
  }
  return rows;
}

void write_ablation_csv(std::ostream& out, const RunConfig& config, std::span<const AblationRow> rows) {
  out << "seed,strategy,weights";
  for (const auto& t : config.tasks) out << ",loss_" << t.id;
  out << ",balanced_metric,worst_task\n";
  for (const auto& r : rows) {
    out << r.seed << ',' << r.strategy << ",\"" << r.weights << '"';
    for (double l : r.final_losses) out << ',' << fmt17(l);
    out << ',' << fmt17(r.balanced_metric) << ',' << fmt17(r.worst_task) << '\n';
  }
}

}  // namespace ombal::cli
