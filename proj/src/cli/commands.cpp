// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#include "ombal/cli/commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "ombal/alignment/alignment.hpp"
#include "ombal/calibration/calibration.hpp"
#include "ombal/cli/ablation.hpp"
#include "ombal/cli/replay.hpp"
#include "ombal/cli/run_dir.hpp"
#include "ombal/core/config.hpp"
#include "ombal/core/metrics.hpp"
#include "ombal/error.hpp"
#include "ombal/trainer/trainer.hpp"

namespace ombal::cli {

namespace fs = std::filesystem;

namespace {

struct GlobalArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "runs";
  std::optional<std::string> strategy;
  std::optional<std::uint64_t> max_steps;
  std::string trace;
  std::size_t seeds = 3;
  std::string grid = "auto";
};

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunConfig load(const GlobalArgs& g) {
  if (g.config.empty()) throw ValidationError("--config", "required");
  RunConfig config = load_config(g.config);
  apply_seed_override(config, g.seed);
  return config;
}

// Bakes command-line overrides into the config so the snapshot alone
// reproduces the run.
void apply_overrides(RunConfig& config, const GlobalArgs& g) {
  if (g.strategy) {
    const Strategy s = parse_strategy(*g.strategy, "--strategy");
    config.strategy = s;
    for (auto& st : config.stages) st.strategy = s;
  }
  if (g.max_steps) {
    config.max_steps = *g.max_steps;
    for (auto& st : config.stages) {
      st.epochs.reset();
      st.max_steps = *g.max_steps;
    }
  }
  validate(config);
}

int cmd_calibrate(const GlobalArgs& g, std::ostream& out) {
  RunConfig config = load(g);
  if (g.max_steps) config.max_calib_steps = *g.max_steps;
  validate(config);
  RunDirectory dir(g.out, "calibrate", serialize(config), config.seed);
  try {
    auto model = trainer::build_model(config, config.seed);
    std::vector<std::size_t> all(config.tasks.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const auto cal = calibration::calibrate(model, all, model.params, config, config.eta, Rng(config.seed));

    std::ostringstream w;
    w << "# alpha_scale=" << fmt17(cal.alpha_scale) << '\n';
    for (std::size_t i = 0; i < all.size(); ++i)
      w << config.tasks[i].id << ' ' << fmt17(cal.converged_losses[i]) << ' ' << fmt17(cal.weights[i]) << '\n';
    write_file_atomic(dir.path() / "weights.txt", w.str());
    dir.add_output("weights", "weights.txt");
    dir.set_status("ok");
  } catch (const Error& e) {
    dir.set_status("failed", e.what());
    dir.write_manifest(true);
    throw;
  }
  dir.write_manifest(true);
  out << dir.path().string() << '\n';
  return kExitOk;
}

int cmd_train(const GlobalArgs& g, std::ostream& out, std::ostream& err) {
  RunConfig config = load(g);
  apply_overrides(config, g);
  RunDirectory dir(g.out, "train", serialize(config), config.seed);
  dir.add_output("metrics", "metrics.jsonl");
  dir.write_manifest(false);
  JsonlWriter sink(dir.path() / "metrics.jsonl");
  try {
    trainer::Trainer trainer(config, {}, sink, [&err](const std::string& m) { err << "warning: " << m << '\n'; });
    const auto result = trainer.run();
    sink.flush();
    dir.set_status("ok");
    dir.write_manifest(true);
    for (std::size_t i = 0; i < config.tasks.size(); ++i)
      err << config.tasks[i].id << ": val " << fmt17(result.initial_val_losses[i]) << " -> "
          << fmt17(result.final_val_losses[i]) << '\n';
  } catch (const Error& e) {
    sink.flush();
    dir.set_status("failed", e.what());
    dir.write_manifest(true);
    throw;
  }
  out << dir.path().string() << '\n';
  return kExitOk;
}

int cmd_replay(const GlobalArgs& g, std::ostream& out, std::ostream& err) {
  dynamic_balance::ControllerParams params;
  if (!g.config.empty()) {
    const RunConfig config = load(g);
    params = {config.window_h, config.scale_f, config.ema_alpha, config.eps};
  }
  if (g.trace.empty()) throw ValidationError("--trace", "required");
  std::ifstream in(g.trace);
  if (!in) throw ValidationError("--trace", "cannot open " + g.trace);
  const LossTrace trace = parse_loss_trace(in);
  std::vector<std::string> warnings;
  const auto rows = replay(trace, params, &warnings);
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  write_replay_csv(out, trace, rows);
  return kExitOk;
}

int cmd_ablate(const GlobalArgs& g, std::ostream& out) {
  RunConfig config = load(g);
  validate(config);
  std::string grid = g.grid;
  if (grid == "auto") grid = config.strategy == Strategy::dynamic ? "dynamic" : "step";
  std::vector<AblationCell> cells;
  if (grid == "step" || grid == "all") cells = step_balance_cells(config.tasks.size());
  if (grid == "dynamic" || grid == "all") {
    auto d = dynamic_balance_cells(config.tasks.size());
    cells.insert(cells.end(), d.begin(), d.end());
  }
  if (cells.empty()) throw ValidationError("--grid", "expected auto, step, dynamic or all");
  if (g.seeds == 0) throw ValidationError("--seeds", "must be >= 1");

  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < g.seeds; ++i) seeds.push_back(config.seed + i);

  RunDirectory dir(g.out, "ablate", serialize(config), config.seed);
  std::ostringstream csv;
  try {
    const auto rows = run_ablation(config, cells, seeds, g.max_steps);
    write_ablation_csv(csv, config, rows);
  } catch (const Error& e) {
    dir.set_status("failed", e.what());
    dir.write_manifest(true);
    throw;
  }
  write_file_atomic(dir.path() / "ablation.csv", csv.str());
  dir.add_output("table", "ablation.csv");
  dir.set_status("ok");
  dir.write_manifest(true);
  out << csv.str();
  out << dir.path().string() << '\n';
  return kExitOk;
}

int cmd_align_demo(const GlobalArgs& g, std::ostream& out) {
  alignment::ToyPolicyOptions opts;
  if (!g.config.empty()) {
    const RunConfig config = load(g);
    opts.beta = config.dpo_beta;
    opts.lambda_it = config.lambda_it;
    opts.seed = config.seed;
  } else {
    RunConfig defaults;
    apply_seed_override(defaults, g.seed);
    opts.seed = defaults.seed;
  }
  if (g.max_steps) opts.steps = *g.max_steps;
  const auto points = alignment::fit_toy_policy(opts);
  out << "step,dpo_loss,it_loss,alignment_loss\n";
  for (const auto& p : points)
    out << p.step << ',' << fmt17(p.dpo_loss) << ',' << fmt17(p.it_loss) << ',' << fmt17(p.alignment_loss) << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ombal: loss balancing for multi-task training"};
  app.name("ombal");
  app.fallthrough();
  app.require_subcommand(1);
  GlobalArgs g;
  app.add_option("--config", g.config, "TOML run configuration");
  app.add_option("--seed", g.seed, "Seed (overrides OMBAL_SEED and the config file)");
  app.add_option("--out", g.out, "Parent directory for run directories")->capture_default_str();
  app.add_option("--strategy", g.strategy, "random | round_robin | accumulation | dynamic | uniform");
  app.add_option("--max-steps", g.max_steps, "Step budget override");

  auto* calibrate = app.add_subcommand("calibrate", "Calibrate per-task loss weights");
  auto* train = app.add_subcommand("train", "Run the staged training plan");
  auto* replay_cmd = app.add_subcommand("replay", "Replay the dynamic controller over a loss trace");
  replay_cmd->add_option("--trace", g.trace, "CSV with segment,task_id,val_loss")->required();
  auto* ablate = app.add_subcommand("ablate", "Compare balancing strategies over seeds");
  ablate->add_option("--seeds", g.seeds, "Number of consecutive seeds")->capture_default_str();
  ablate->add_option("--grid", g.grid, "auto | step | dynamic | all")->capture_default_str();
  auto* align = app.add_subcommand("align-demo", "Fit a toy policy to the alignment objective");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (calibrate->parsed()) return cmd_calibrate(g, out);
    if (train->parsed()) return cmd_train(g, out, err);
    if (replay_cmd->parsed()) return cmd_replay(g, out, err);
    if (ablate->parsed()) return cmd_ablate(g, out);
    if (align->parsed()) return cmd_align_demo(g, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const RuntimeFailure& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace ombal::cli
