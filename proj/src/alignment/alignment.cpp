// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#include "ombal/alignment/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ombal/core/rng.hpp"
#include "ombal/error.hpp"

namespace ombal::alignment {

void PreferencePair::validate() const {
  auto check = [](double v, const char* field) {
    if (!(std::isfinite(v) && v <= 0)) throw ValidationError(field, "log-probabilities must be finite and <= 0");
  };
  check(chosen_logprob_policy, "chosen_logprob_policy");
  check(chosen_logprob_ref, "chosen_logprob_ref");
  check(rejected_logprob_policy, "rejected_logprob_policy");
  check(rejected_logprob_ref, "rejected_logprob_ref");
}

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

double preference_margin(const PreferencePair& p) {
  return (p.chosen_logprob_policy - p.chosen_logprob_ref) - (p.rejected_logprob_policy - p.rejected_logprob_ref);
}

double dpo_loss(const PreferencePair& pair, double beta) { return softplus(-beta * preference_margin(pair)); }

double alignment_loss(const PreferencePair& pair, double beta, double lambda_it) {
  return dpo_loss(pair, beta) + lambda_it * pair.it_loss;
}

DpoGradient dpo_loss_gradient(const PreferencePair& pair, double beta) {
  // d/dm softplus(-beta m) = -beta sigmoid(-beta m)
  const double g = -beta * sigmoid(-beta * preference_margin(pair));
  return {g, -g, -g, g};
}

namespace {

std::vector<double> log_softmax(const std::vector<double>& logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - top);
  const double lse = top + std::log(sum);
  std::vector<double> out;
  out.reserve(logits.size());
  for (double v : logits) out.push_back(v - lse);
  return out;
}

}  // namespace

std::vector<ToyPolicyPoint> fit_toy_policy(const ToyPolicyOptions& o) {
  if (o.categories < 2) throw ValidationError("categories", "must be >= 2");
  if (!(o.beta > 0)) throw ValidationError("dpo_beta", "must be > 0");
  if (!(o.lambda_it >= 0)) throw ValidationError("lambda_it", "must be >= 0");
  const std::size_t k = o.categories;
  Rng rng(o.seed);

  std::vector<double> quality(k);
  for (std::size_t c = 0; c < k; ++c) quality[c] = static_cast<double>(c) / static_cast<double>(k - 1) * 2.0;

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  while (pairs.size() < o.pairs) {
    auto a = static_cast<std::size_t>(rng.below(k));
    auto b = static_cast<std::size_t>(rng.below(k));
    if (a == b) continue;
    if (quality[a] < quality[b]) std::swap(a, b);
    pairs.emplace_back(a, b);
  }

  const auto target = log_softmax(quality);
  std::vector<std::size_t> instructions;
  for (std::size_t n = 0; n < o.instruction_samples; ++n) {
    double u = rng.uniform();
    std::size_t c = 0;
    for (; c + 1 < k; ++c) {
      u -= std::exp(target[c]);
      if (u < 0) break;
    }
    instructions.push_back(c);
  }

  std::vector<double> logits(k, 0.0);
  const auto reference = log_softmax(logits);

  std::vector<ToyPolicyPoint> trajectory;
  for (std::uint64_t step = 0;; ++step) {
    const auto logp = log_softmax(logits);
    std::vector<double> grad(k, 0.0);
    double dpo = 0.0;
    for (auto [c, r] : pairs) {
      const PreferencePair pair{logp[c], reference[c], logp[r], reference[r], 0.0};
      dpo += dpo_loss(pair, o.beta);
      // d log pi(c) / d logits = e_c - pi; the softmax terms cancel in the margin.
      const auto g = dpo_loss_gradient(pair, o.beta);
      grad[c] += g.chosen_policy;
      grad[r] += g.rejected_policy;
    }
    dpo /= static_cast<double>(pairs.size());
    for (auto& g : grad) g /= static_cast<double>(pairs.size());

    double it = 0.0;
    std::vector<double> it_grad(k, 0.0);
    for (auto c : instructions) {
      it -= logp[c];
      it_grad[c] -= 1.0;
      for (std::size_t j = 0; j < k; ++j) it_grad[j] += std::exp(logp[j]);
    }
    const double inv_n = instructions.empty() ? 0.0 : 1.0 / static_cast<double>(instructions.size());
    it *= inv_n;

    trajectory.push_back({step, dpo, it, dpo + o.lambda_it * it});
    if (step == o.steps) break;
    for (std::size_t j = 0; j < k; ++j) logits[j] -= o.eta * (grad[j] + o.lambda_it * it_grad[j] * inv_n);
  }
  return trajectory;
}

}  // namespace ombal::alignment
