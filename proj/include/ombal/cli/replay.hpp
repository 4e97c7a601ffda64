// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Offline replay of the dynamic controller over a recorded trace of
// validation losses.
//
// Input CSV, header required:   segment,task_id,val_loss
// Output CSV:                   segment,task_id,weight
//
// Tasks are ordered by first appearance. Every segment must list every task
// exactly once; segments appear in non-decreasing order.

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ombal/dynamic_balance/controller.hpp"

namespace ombal::cli {

struct LossTrace {
  std::vector<std::string> task_ids;
  std::vector<std::int64_t> segments;
  std::vector<std::vector<double>> losses;  // [segment][task]
};

// Throws ParseError naming the offending row (1-based file line).
LossTrace parse_loss_trace(std::istream& in);

struct ReplayRow {
  std::int64_t segment = 0;
  std::vector<double> weights;
};

// Warnings from degenerate windows go to `warnings` when non-null.
std::vector<ReplayRow> replay(const LossTrace& trace, const dynamic_balance::ControllerParams& params,
                              std::vector<std::string>* warnings = nullptr);

void write_replay_csv(std::ostream& out, const LossTrace& trace, std::span<const ReplayRow> rows);

}  // namespace ombal::cli
