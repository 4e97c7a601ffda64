// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Alignment-tuning objective: a DPO preference loss on (chosen, rejected)
// pairs plus a lambda-weighted instruction loss,
//   loss = -log sigmoid(beta * margin) + lambda * it_loss,
//   margin = (log pi - log ref)_chosen - (log pi - log ref)_rejected.

#include <cstdint>
#include <string>
#include <vector>

namespace ombal::alignment {

struct PreferencePair {
  double chosen_logprob_policy = 0.0;
  double chosen_logprob_ref = 0.0;
  double rejected_logprob_policy = 0.0;
  double rejected_logprob_ref = 0.0;
  double it_loss = 0.0;

  // Log-probabilities must be <= 0; throws ValidationError otherwise.
  void validate() const;
};

double preference_margin(const PreferencePair& pair);
double dpo_loss(const PreferencePair& pair, double beta);
double alignment_loss(const PreferencePair& pair, double beta, double lambda_it);

// Partial derivatives of dpo_loss with respect to the four log-probabilities.
struct DpoGradient {
  double chosen_policy = 0.0;
  double chosen_ref = 0.0;
  double rejected_policy = 0.0;
  double rejected_ref = 0.0;
};

DpoGradient dpo_loss_gradient(const PreferencePair& pair, double beta);

// log(1 + exp(x)), overflow-safe.
double softplus(double x);

// Toy categorical policy over `categories` outcomes fitted by gradient
// descent on the alignment loss. The reference policy is the initial
// (uniform) policy. Preference pairs always prefer the outcome with the
// higher latent quality; instruction samples are drawn from softmax(quality).
struct ToyPolicyOptions {
  std::size_t categories = 6;
  std::size_t pairs = 64;
  std::size_t instruction_samples = 64;
  std::uint64_t steps = 200;
  double eta = 0.5;
  double beta = 0.1;
  double lambda_it = 0.3;
  std::uint64_t seed = 0;
};

struct ToyPolicyPoint {
  std::uint64_t step = 0;
  double dpo_loss = 0.0;
  double it_loss = 0.0;
  double alignment_loss = 0.0;
};

// One point per step, including step 0 (before any update).
std::vector<ToyPolicyPoint> fit_toy_policy(const ToyPolicyOptions& options);

}  // namespace ombal::alignment
