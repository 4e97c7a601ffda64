// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Small-scale strategy ablations. Every cell is one training run of the same
// configuration with the strategy and weights overridden in every stage.
// Runs are compared on held-out losses normalized by their value before
// training (1 = no progress, lower is better):
//   balanced_metric = mean_i L_i(final) / L_i(initial)
//   worst_task      = max_i  L_i(final) / L_i(initial)

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ombal/core/config.hpp"

namespace ombal::cli {

struct AblationCell {
  Strategy strategy = Strategy::accumulation;
  WeightSetting weights;
  std::string weights_label;
};

// Random / round-robin / accumulation with unit weights, then accumulation
// with calibrated weights.
std::vector<AblationCell> step_balance_cells(std::size_t task_count);
// Unit-weight mixture versus the dynamic controller.
std::vector<AblationCell> dynamic_balance_cells(std::size_t task_count);

struct AblationRow {
  std::string seed;  // decimal seed, or "mean"
  std::string strategy;
  std::string weights;
  std::vector<double> final_losses;  // raw held-out losses, every task
  double balanced_metric = 0.0;
  double worst_task = 0.0;
};

// `config` with the cell's strategy/weights forced into every stage.
RunConfig apply_cell(RunConfig config, const AblationCell& cell, std::optional<std::uint64_t> max_steps = {});

AblationRow run_cell(const RunConfig& config, const AblationCell& cell, std::uint64_t seed,
                     std::optional<std::uint64_t> max_steps = {});

// seeds x cells rows (seed-major), followed by one mean row per cell.
std::vector<AblationRow> run_ablation(const RunConfig& config, std::span<const AblationCell> cells,
                                      std::span<const std::uint64_t> seeds,
                                      std::optional<std::uint64_t> max_steps = {});

void write_ablation_csv(std::ostream& out, const RunConfig& config, std::span<const AblationRow> rows);

}  // namespace ombal::cli
