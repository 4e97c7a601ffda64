// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks. One line per criterion:
//   AC<n> PASS|FAIL <name> (<seconds> s, limit <limit> s) <detail>
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "ombal/alignment/alignment.hpp"
#include "ombal/calibration/calibration.hpp"
#include "ombal/cli/ablation.hpp"
#include "ombal/cli/commands.hpp"
#include "ombal/core/config.hpp"
#include "ombal/dynamic_balance/controller.hpp"
#include "ombal/samplers/samplers.hpp"
#include "ombal/trainer/model.hpp"
#include "ombal/trainer/objective.hpp"

using namespace ombal;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = std::string(OMBAL_SOURCE_DIR) + "/configs/";

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (o.ok && secs > limit_s) {
    o.ok = false;
    o.detail = "too slow";
  }
  failures += !o.ok;
  std::printf("AC%-2d %s %s (%.3f s, limit %.0f s)%s%s\n", id, o.ok ? "PASS" : "FAIL", name, secs, limit_s,
              o.detail.empty() ? "" : " ", o.detail.c_str());
  std::fflush(stdout);
}

double sum(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s;
}

std::string fmt(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.6g", v);
  return b;
}

Outcome ac1() {
  Outcome o;
  Rng r(101);
  for (int c = 0; c < 1000; ++c) {
    dynamic_balance::ControllerParams p;
    p.window_h = 2 + r.below(8);
    p.scale_f = 0.1 + 5 * r.uniform();
    p.ema_alpha = 0.99 * r.uniform();
    const std::size_t m = 1 + r.below(8);
    dynamic_balance::BalanceState s(m, p);
    std::vector<double> level(m), rate(m);
    for (std::size_t k = 0; k < m; ++k) {
      level[k] = std::exp(4 * r.uniform() - 2);
      rate[k] = 0.3 * r.normal();
    }
    const int segments = static_cast<int>(p.window_h) + 1 + static_cast<int>(r.below(20));
    for (int t = 0; t < segments; ++t) {
      std::vector<double> l(m);
      for (std::size_t k = 0; k < m; ++k) l[k] = level[k] * std::exp(rate[k] * t + 0.2 * r.normal());
      s.record_segment(l);
      const auto& w = s.step_weights();
      o.require(std::fabs(sum(w) - static_cast<double>(m)) <= 1e-9, "smoothed sum off in case " + std::to_string(c));
      if (s.segment_index() > p.window_h && !s.last_update_degenerate())
        o.require(std::fabs(sum(s.raw_weights()) - static_cast<double>(m)) <= 1e-9,
                  "raw sum off in case " + std::to_string(c));
    }
  }
  return o;
}

Outcome ac2() {
  Outcome o;
  const auto w = calibration::compute_weights(std::vector<double>{1, 2, 4}, 10);
  const double expect[] = {40.0 / 7, 20.0 / 7, 10.0 / 7};
  for (int i = 0; i < 3; ++i) o.require(std::fabs(w[i] - expect[i]) <= 1e-12, "example w" + std::to_string(i));
  Rng r(202);
  for (int c = 0; c < 1000; ++c) {
    const std::size_t m = 1 + r.below(10);
    std::vector<double> l(m);
    for (auto& x : l) x = std::exp(8 * r.uniform() - 4);
    const double alpha = 0.1 + 50 * r.uniform();
    const auto base = calibration::compute_weights(l, alpha);
    const double k = std::exp(10 * r.uniform() - 5);
    auto scaled = l;
    for (auto& x : scaled) x *= k;
    const auto ws = calibration::compute_weights(scaled, alpha);
    for (std::size_t i = 0; i < m; ++i) {
      o.require(std::fabs(ws[i] - base[i]) <= 1e-12 * alpha, "scale invariance case " + std::to_string(c));
      for (std::size_t j = 0; j < m; ++j)
        if (l[i] < l[j]) o.require(base[i] > base[j], "antitone case " + std::to_string(c));
    }
  }
  return o;
}

Outcome ac3() {
  Outcome o;
  dynamic_balance::ControllerParams p;
  p.window_h = 3;
  p.scale_f = 1.0;
  dynamic_balance::BalanceState s(2, p);
  const double t1[] = {3.0, 1.0, 0.5, 0.0}, t2[] = {3.0, 0.0, 0.5, 1.0};
  for (int k = 0; k < 4; ++k) {
    s.record_segment(std::vector<double>{t1[k], t2[k]});
    s.step_weights();
  }
  const auto raw = s.raw_weights();
  const auto smooth = s.smoothed_weights();
  const auto ref_raw = oracle::raw_weights({-0.5, 0.5}, 1.0);
  const auto ref_smooth = oracle::ema({1, 1}, ref_raw, 0.9);
  o.require(std::fabs(s.fits()[0].slope + 0.5) < 1e-12 && std::fabs(s.fits()[1].slope - 0.5) < 1e-12, "slopes");
  o.require(std::fabs(raw[0] - 1.46212) <= 1e-5 && std::fabs(raw[1] - 0.53788) <= 1e-5,
            "raw " + fmt(raw[0]) + "," + fmt(raw[1]));
  o.require(std::fabs(smooth[0] - 1.04621) <= 1e-5 && std::fabs(smooth[1] - 0.95379) <= 1e-5,
            "ema " + fmt(smooth[0]) + "," + fmt(smooth[1]));
  for (int i = 0; i < 2; ++i) {
    o.require(std::fabs(raw[i] - ref_raw[i]) <= 1e-12, "raw vs oracle");
    o.require(std::fabs(smooth[i] - ref_smooth[i]) <= 1e-12, "ema vs oracle");
  }
  if (o.ok) o.detail = "raw [" + fmt(raw[0]) + ", " + fmt(raw[1]) + "] ema [" + fmt(smooth[0]) + ", " + fmt(smooth[1]) + "]";
  return o;
}

Outcome ac4() {
  Outcome o;
  Rng r(404);
  for (int c = 0; c < 500; ++c) {
    dynamic_balance::ControllerParams p;
    p.window_h = 2 + r.below(10);
    const std::size_t m = 1 + r.below(6);
    dynamic_balance::BalanceState s(m, p);
    for (std::size_t t = 1; t <= p.window_h; ++t) {
      std::vector<double> l(m);
      for (auto& x : l) x = r.bernoulli(0.1) ? 0.0 : 100 * r.uniform();
      s.record_segment(l);
      for (double w : s.step_weights()) o.require(w == 1.0, "weight != 1 at segment " + std::to_string(t));
    }
  }
  return o;
}

Outcome ac5() {
  Outcome o;
  Rng r(505);
  double worst_obj = 0, worst_dpo = 0;
  auto gradcheck = [&](trainer::Objective& obj) {
    std::vector<std::size_t> batch(8);
    for (int p = 0; p < 500; ++p) {
      for (auto& b : batch) b = r.below(obj.sample_count());
      std::vector<double> z(obj.dim());
      for (auto& v : z) v = 2 * r.normal();
      std::vector<double> g(obj.dim());
      obj.evaluate(z, batch, g);
      auto f = [&](const std::vector<double>& x) { return obj.evaluate(x, batch, {}); };
      const double e = oracle::relative_error(g, oracle::central_difference(f, z, 1e-5));
      worst_obj = std::max(worst_obj, e);
    }
  };
  TaskSpec q;
  q.id = "q";
  q.volume = 100;
  q.train_batch = 8;
  q.val_batch = 8;
  q.loss_kind = LossKind::quadratic;
  q.dim = 5;
  q.curvature = 3.0;
  q.center = 1.0;
  q.noise = 0.5;
  auto quad = trainer::make_objective(q, Rng(1));
  gradcheck(*quad);
  TaskSpec l = q;
  l.loss_kind = LossKind::logistic;
  l.label_noise = 0.1;
  auto logi = trainer::make_objective(l, Rng(2));
  gradcheck(*logi);
  // Replay objectives advance on every call; differentiate once exhausted.
  trainer::TraceObjective tr(std::vector<double>{3, 2, 1}, 4, 10);
  const std::size_t first[] = {0};
  for (int i = 0; i < 3; ++i) tr.evaluate(std::vector<double>(4, 0.0), first, {});
  gradcheck(tr);

  for (int p = 0; p < 500; ++p) {
    alignment::PreferencePair pp{-5 * r.uniform(), -5 * r.uniform(), -5 * r.uniform(), -5 * r.uniform(), 0};
    const double beta = 0.05 + 2 * r.uniform();
    const auto g = alignment::dpo_loss_gradient(pp, beta);
    auto f = [&](const std::vector<double>& x) {
      return alignment::dpo_loss(alignment::PreferencePair{x[0], x[1], x[2], x[3], 0}, beta);
    };
    const auto fd = oracle::central_difference(
        f, {pp.chosen_logprob_policy, pp.chosen_logprob_ref, pp.rejected_logprob_policy, pp.rejected_logprob_ref},
        1e-5);
    worst_dpo = std::max(worst_dpo, oracle::relative_error(
                                        {g.chosen_policy, g.chosen_ref, g.rejected_policy, g.rejected_ref}, fd));
  }
  o.require(worst_obj < 1e-4, "objective rel err " + fmt(worst_obj));
  o.require(worst_dpo < 1e-6, "dpo rel err " + fmt(worst_dpo));
  if (o.ok) o.detail = "max rel err objectives " + fmt(worst_obj) + ", dpo " + fmt(worst_dpo);
  return o;
}

Outcome ac6() {
  Outcome o;
  const auto c = parse_config(R"(
eta = 0.004
[[tasks]]
id = "q"
loss_kind = "quadratic"
volume = 64
train_batch = 4
dim = 4
curvature = 1.5
center = 2.0
noise = 0.0
init = -1.0
)");
  auto m = trainer::build_model(c, 0);
  const double a = 1.5, eta = 0.004, l0 = 0.5 * a * 4 * 9.0;
  double worst = 0;
  for (int t = 0; t <= 1000; ++t) {
    const auto batch = m.tasks[0].next_train_batch();
    const auto lg = trainer::loss_and_grad(m.tasks[0], m.params, batch);
    worst = std::max(worst, std::fabs(lg.loss / (l0 * std::pow(1 - eta * a, 2.0 * t)) - 1));
    trainer::sgd_step(m.params, lg.grads, eta);
  }
  o.require(worst <= 1e-9, "rel err " + fmt(worst));
  if (o.ok) o.detail = "max rel err " + fmt(worst);
  return o;
}

Outcome ac7() {
  Outcome o;
  Rng r(707);
  for (int i = 0; i < 200; ++i) {
    const double lc = -5 * r.uniform(), lr = -5 * r.uniform();
    alignment::PreferencePair p{lc, lc, lr, lr, 3 * r.uniform()};
    const double beta = 0.01 + 3 * r.uniform();
    o.require(std::fabs(alignment::dpo_loss(p, beta) - std::log(2.0)) <= 1e-12, "policy = reference != ln 2");
    const double d = alignment::dpo_loss(p, beta);
    o.require(alignment::alignment_loss(p, beta, 0.3) == d + 0.3 * p.it_loss, "not dpo + 0.3 it");
    const double y0 = alignment::alignment_loss({lc, lc, lr, lr, 0.0}, beta, 0.3);
    const double y1 = alignment::alignment_loss({lc, lc, lr, lr, 1.0}, beta, 0.3);
    o.require(std::fabs((y1 - y0) - 0.3) <= 1e-12, "slope in it_loss != 0.3");
  }
  return o;
}

Outcome ac8() {
  Outcome o;
  const RunConfig c = load_config(kConfigs + "step_balance.toml");
  const auto cells = cli::step_balance_cells(c.tasks.size());
  const std::vector<std::uint64_t> seeds{c.seed, c.seed + 1, c.seed + 2};
  const auto rows = cli::run_ablation(c, cells, seeds);
  auto mean_of = [&](Strategy s, const std::string& w) {
    for (const auto& row : rows)
      if (row.seed == "mean" && row.strategy == to_string(s) && row.weights == w) return row.balanced_metric;
    throw std::runtime_error("missing row");
  };
  const std::string ones = cells[0].weights_label;
  const double cal = mean_of(Strategy::accumulation, "calibrated");
  const double acc = mean_of(Strategy::accumulation, ones);
  const double rnd = mean_of(Strategy::random, ones);
  // Lower normalized held-out loss is better.
  o.require(cal <= acc && acc <= rnd, "cal " + fmt(cal) + " acc " + fmt(acc) + " random " + fmt(rnd));
  if (o.ok) o.detail = "mean balanced loss: calibrated " + fmt(cal) + " <= [1,1,1] " + fmt(acc) + " <= random " + fmt(rnd);
  return o;
}

Outcome ac9() {
  Outcome o;
  const RunConfig c = load_config(kConfigs + "dynamic_balance.toml");
  const auto cells = cli::dynamic_balance_cells(c.tasks.size());
  int wins = 0;
  std::string detail;
  for (std::uint64_t s = c.seed; s < c.seed + 3; ++s) {
    const auto uni = cli::run_cell(c, cells[0], s);
    const auto dyn = cli::run_cell(c, cells[1], s);
    wins += dyn.worst_task <= uni.worst_task;
    detail += " seed " + std::to_string(s) + ": " + fmt(dyn.worst_task) + " vs " + fmt(uni.worst_task) + ";";
  }
  o.require(wins >= 2, "dynamic won " + std::to_string(wins) + "/3:" + detail);
  if (o.ok) o.detail = "dynamic worst-task <= uniform in " + std::to_string(wins) + "/3 seeds;" + detail;
  return o;
}

Outcome ac10() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "ombal_acceptance_determinism";
  fs::remove_all(root);
  auto train = [&]() {
    std::ostringstream out, err;
    const int rc = cli::run({"train", "--config", kConfigs + "staged.toml", "--out", root.string()}, out, err);
    if (rc != 0) throw std::runtime_error("train exit " + std::to_string(rc) + ": " + err.str());
    std::string s = out.str();
    while (!s.empty() && s.back() == '\n') s.pop_back();
    std::ifstream in(fs::path(s) / "metrics.jsonl", std::ios::binary);
    std::ostringstream data;
    data << in.rdbuf();
    return data.str();
  };
  const auto a = train();
  const auto b = train();
  o.require(!a.empty(), "empty metrics");
  o.require(a == b, "metrics differ");
  if (o.ok) o.detail = std::to_string(a.size()) + " identical bytes";
  fs::remove_all(root);
  return o;
}

Outcome ac11() {
  Outcome o;
  const std::vector<std::uint64_t> volumes{4000, 1000, 250, 50};
  const double total = 5300;
  samplers::RandomProportional rp(volumes, Rng(1111));
  const std::size_t n = 100000;
  std::vector<std::size_t> counts(volumes.size(), 0);
  for (std::size_t i = 0; i < n; ++i) ++counts[rp.next().contributions[0].task];
  for (std::size_t i = 0; i < volumes.size(); ++i) {
    const double p = volumes[i] / total;
    const double z = (counts[i] - n * p) / std::sqrt(n * p * (1 - p));
    o.require(std::fabs(z) <= 4, "task " + std::to_string(i) + " z=" + fmt(z));
  }
  for (std::size_t m = 1; m <= 9; ++m) {
    samplers::RoundRobin rr(m);
    std::vector<std::size_t> seq;
    for (int t = 0; t < 1000; ++t) seq.push_back(rr.next().contributions[0].task);
    for (std::size_t s = 0; s + m <= seq.size(); ++s)
      o.require(std::set<std::size_t>(seq.begin() + s, seq.begin() + s + m).size() == m,
                "round-robin window m=" + std::to_string(m));
  }
  return o;
}

}  // namespace

int main() {
  criterion(1, "weight-sum conservation", 10, ac1);
  criterion(2, "calibration weights", 5, ac2);
  criterion(3, "controller worked example", 1, ac3);
  criterion(4, "warm-up freeze", 1, ac4);
  criterion(5, "gradient checks", 30, ac5);
  criterion(6, "closed-form trajectory", 1, ac6);
  criterion(7, "dpo identity", 1, ac7);
  criterion(8, "step-balance ablation", 60, ac8);
  criterion(9, "dynamic-balance ablation", 60, ac9);
  criterion(10, "determinism", 30, ac10);
  criterion(11, "sampler statistics", 10, ac11);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures;
}
