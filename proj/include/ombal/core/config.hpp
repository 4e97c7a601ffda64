// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ombal {

enum class LossKind { quadratic, logistic, trace };

// Balance schedule of one stage. `uniform` is the summed mixture with every
// weight pinned to 1; `dynamic` is the summed mixture driven by the
// validation-slope controller.
enum class Strategy { random, round_robin, accumulation, dynamic, uniform };

std::string_view to_string(LossKind k);
std::string_view to_string(Strategy s);
// Throw ValidationError(field, ...) on unknown names.
LossKind parse_loss_kind(std::string_view name, const std::string& field = "loss_kind");
Strategy parse_strategy(std::string_view name, const std::string& field = "strategy");

struct TaskSpec {
  std::string id;
  std::uint64_t volume = 0;
  std::uint64_t train_batch = 0;
  std::uint64_t val_batch = 0;  // defaults to train_batch
  std::uint64_t val_steps = 1;
  LossKind loss_kind = LossKind::quadratic;

  // Synthetic objective parameters.
  std::uint64_t dim = 1;
  double curvature = 1.0;     // quadratic
  double center = 0.0;        // quadratic: location of the data mean
  double noise = 0.0;         // quadratic: per-sample std around the center
  double init = 1.0;          // initial parameter value of the private group
  double label_noise = 0.0;   // logistic: label flip probability
  double feature_scale = 1.0; // logistic
  std::vector<double> trace;  // trace: replayed loss sequence
  std::vector<std::string> groups;
  std::optional<std::uint64_t> noise_seed;

  std::uint64_t val_reservoir() const { return val_steps * val_batch; }
  std::uint64_t train_pool() const { return volume - val_reservoir(); }

  bool operator==(const TaskSpec&) const = default;
};

struct GroupSpec {
  std::string name;
  std::uint64_t dim = 1;
  double init = 0.0;
  double lr_scale = 1.0;
  bool encoder = false;  // takes the stage's lr_encoders when one is set

  bool operator==(const GroupSpec&) const = default;
};

enum class WeightMode { automatic, uniform, calibrated, fixed };

struct WeightSetting {
  WeightMode mode = WeightMode::automatic;
  std::vector<double> values;  // only for `fixed`

  bool operator==(const WeightSetting&) const = default;
};

struct StageSpec {
  std::int64_t id = 1;
  std::vector<std::string> trainable;  // empty: every group
  std::vector<std::string> tasks;      // empty: every task
  std::optional<double> lr;            // defaults to RunConfig::eta
  std::optional<double> lr_encoders;
  std::optional<std::uint64_t> epochs;
  std::optional<std::uint64_t> max_steps;
  std::optional<Strategy> strategy;
  std::optional<double> text_ratio;
  WeightSetting weights;

  bool operator==(const StageSpec&) const = default;
};

struct RunConfig {
  std::vector<TaskSpec> tasks;
  std::uint64_t seed = 0;
  double eta = 0.01;
  double alpha_scale = 10.0;
  double ema_alpha = 0.9;
  std::uint64_t window_h = 5;
  double scale_f = 1.0;
  double eps = 1e-6;
  std::uint64_t val_interval = 100;
  double text_ratio = 0.25;
  double lambda_it = 0.3;
  double dpo_beta = 0.1;

  Strategy strategy = Strategy::accumulation;
  std::uint64_t max_steps = 1000;
  std::uint64_t max_calib_steps = 10000;
  double subset_fraction = 0.1;
  double calib_tol = 1e-3;
  std::uint64_t calib_patience = 5;
  std::string text_task;  // empty: no pure-text task

  std::vector<GroupSpec> groups;  // empty: one private group per task
  std::vector<StageSpec> stages;  // empty: a single implicit stage

  const TaskSpec* find_task(std::string_view id) const;
  std::size_t task_index(std::string_view id) const;  // throws ValidationError

  bool operator==(const RunConfig&) const = default;
};

// Parses, defaults and validates. Unknown keys are rejected.
// Throws ParseError or ValidationError.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

// Checks every invariant; throws ValidationError naming the field.
void validate(const RunConfig& config);

// Fully resolved structured text; parse_config(serialize(c)) == c.
std::string serialize(const RunConfig& config);

// Seed precedence: explicit CLI value, then OMBAL_SEED, then the file.
void apply_seed_override(RunConfig& config, std::optional<std::uint64_t> cli_seed);

}  // namespace ombal
