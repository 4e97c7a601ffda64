// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "ombal/core/rng.hpp"
#include "ombal/dynamic_balance/controller.hpp"
#include "ombal/error.hpp"

using namespace ombal;
using namespace ombal::dynamic_balance;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST(Normalize, Examples) {
  EXPECT_EQ(normalize_window(std::vector<double>{2.0, 1.0}, 1e-6)[0], 1.0);
  const auto n = normalize_window(std::vector<double>{4.0, 2.0, 1.0}, 1e-6);
  const auto ref = oracle::normalize({4.0, 2.0, 1.0}, 1e-6);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(n[i], ref[i]);
  // Window containing zero: lo = 0, so the minimum maps to exactly 0.
  const auto z = normalize_window(std::vector<double>{0.0, 1.0}, 1e-6);
  EXPECT_EQ(z[0], 0.0);
  EXPECT_EQ(z[1], 1.0);
  EXPECT_THROW(normalize_window(std::vector<double>{1e-7, 1e-8}, 1e-6), DegenerateWindow);
}

TEST(FitSlope, Examples) {
  auto f = fit_slope(std::vector<double>{1.0, 0.5, 0.0});
  EXPECT_DOUBLE_EQ(f.slope, -0.5);
  EXPECT_DOUBLE_EQ(f.intercept, 1.0);
  EXPECT_EQ(fit_slope(std::vector<double>{1, 1, 1, 1}).slope, 0.0);
  EXPECT_DOUBLE_EQ(fit_slope(std::vector<double>{0.0, 1.0}).slope, 1.0);
  Rng r(3);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> y(2 + r.below(10));
    for (auto& v : y) v = r.uniform();
    EXPECT_NEAR(fit_slope(y).slope, oracle::ols_slope(y), 1e-12);
  }
}

TEST(Allocate, WorkedExample) {
  const auto a = allocate_weights(std::vector<double>{-0.5, 0.5}, 1.0);
  EXPECT_NEAR(a.normalized_slopes[0], -1.0, 1e-15);
  EXPECT_NEAR(a.normalized_slopes[1], 1.0, 1e-15);
  EXPECT_NEAR(a.scores[0], 0.11920, 1e-5);
  EXPECT_NEAR(a.scores[1], -0.88080, 1e-5);
  EXPECT_NEAR(a.raw_weights[0], 1.46212, 1e-5);
  EXPECT_NEAR(a.raw_weights[1], 0.53788, 1e-5);
  const auto ref = oracle::raw_weights({-0.5, 0.5}, 1.0);
  EXPECT_NEAR(a.raw_weights[0], ref[0], 1e-12);
  EXPECT_NEAR(a.raw_weights[1], ref[1], 1e-12);
  const auto s = smooth_weights(std::vector<double>{1, 1}, a.raw_weights, 0.9);
  EXPECT_NEAR(s[0], 1.04621, 1e-5);
  EXPECT_NEAR(s[1], 0.95379, 1e-5);
}

TEST(Allocate, SymmetricAndDegenerateCases) {
  EXPECT_EQ(allocate_weights(std::vector<double>{-0.3, -0.3, -0.3}, 1.0).raw_weights, (std::vector<double>{1, 1, 1}));
  EXPECT_EQ(allocate_weights(std::vector<double>{0, 0, 0}, 2.0).raw_weights, (std::vector<double>{1, 1, 1}));
  EXPECT_EQ(allocate_weights(std::vector<double>{-7.0}, 1.0).raw_weights, (std::vector<double>{1}));
}

TEST(Allocate, Properties) {
  Rng r(11);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t m = 1 + r.below(6);
    std::vector<double> a(m);
    for (auto& x : a) x = r.normal();
    const double f = 0.1 + 4 * r.uniform();
    const auto al = allocate_weights(a, f);
    ASSERT_NEAR(sum(al.raw_weights), static_cast<double>(m), 1e-9);
    double abs_sum = 0;
    for (double x : al.normalized_slopes) abs_sum += std::fabs(x);
    ASSERT_NEAR(abs_sum, static_cast<double>(m), 1e-9);
    const auto ref = oracle::raw_weights(a, f);
    for (std::size_t k = 0; k < m; ++k) {
      ASSERT_GT(al.raw_weights[k], 0);
      ASSERT_NEAR(al.raw_weights[k], ref[k], 1e-12);
    }
    const double x = 10 * (1 - r.uniform());
    const auto two = allocate_weights(std::vector<double>{-x, x}, f);
    ASSERT_GT(two.raw_weights[0], two.raw_weights[1]);
  }
}

TEST(Smooth, LengthMismatch) {
  EXPECT_THROW(smooth_weights(std::vector<double>{1}, std::vector<double>{1, 1}, 0.9), LengthMismatch);
}

TEST(BalanceState, FreshStateStillWarm) {
  BalanceState s(2, {});
  s.record_segment(std::vector<double>{1.0, 2.0});
  EXPECT_EQ(s.windows()[0].size(), 1u);
  EXPECT_EQ(s.step_weights(), (std::vector<double>{1, 1}));
}

TEST(BalanceState, WorkedExampleTrace) {
  ControllerParams p;
  p.window_h = 3;
  BalanceState s(2, p);
  const double t1[] = {3.0, 1.0, 0.5, 0.0}, t2[] = {3.0, 0.0, 0.5, 1.0};
  for (int k = 0; k < 4; ++k) {
    s.record_segment(std::vector<double>{t1[k], t2[k]});
    const auto w = s.step_weights();
    if (k < 3) {
      EXPECT_EQ(w, (std::vector<double>{1, 1}));
    } else {
      EXPECT_NEAR(s.normalized_slopes()[0], -1.0, 1e-12);
      EXPECT_NEAR(s.raw_weights()[0], 1.46212, 1e-5);
      EXPECT_NEAR(s.raw_weights()[1], 0.53788, 1e-5);
      EXPECT_NEAR(w[0], 1.04621, 1e-5);
      EXPECT_NEAR(w[1], 0.95379, 1e-5);
    }
  }
}

TEST(BalanceState, WarmUpIsExact) {
  Rng r(5);
  for (int c = 0; c < 200; ++c) {
    ControllerParams p;
    p.window_h = 2 + r.below(8);
    const std::size_t m = 1 + r.below(5);
    BalanceState s(m, p);
    for (std::size_t t = 1; t <= p.window_h; ++t) {
      std::vector<double> l(m);
      for (auto& x : l) x = 10 * r.uniform();
      s.record_segment(l);
      for (double w : s.step_weights()) ASSERT_EQ(w, 1.0);
    }
  }
}

TEST(BalanceState, SumConservationAndPositivity) {
  Rng r(6);
  for (int c = 0; c < 300; ++c) {
    ControllerParams p;
    p.window_h = 2 + r.below(6);
    p.scale_f = 0.2 + 3 * r.uniform();
    p.ema_alpha = r.uniform() * 0.99;
    const std::size_t m = 1 + r.below(5);
    BalanceState s(m, p);
    std::vector<double> level(m);
    for (auto& x : level) x = 0.5 + r.uniform();
    for (int t = 0; t < 30; ++t) {
      std::vector<double> l(m);
      for (std::size_t k = 0; k < m; ++k) l[k] = level[k] * std::exp(0.3 * r.normal());
      s.record_segment(l);
      const auto& w = s.step_weights();
      ASSERT_NEAR(sum(w), static_cast<double>(m), 1e-9);
      for (double x : w) ASSERT_GT(x, 0);
      if (s.segment_index() > p.window_h) ASSERT_NEAR(sum(s.raw_weights()), static_cast<double>(m), 1e-9);
    }
  }
}

TEST(BalanceState, ConvergingTaskWinsAgainstConstant) {
  ControllerParams p;
  BalanceState s(2, p);
  // Oracle: walk the same traces through the straight-line formulas.
  std::vector<std::vector<double>> hist(2);
  std::vector<double> smoothed{1, 1};
  for (int t = 0; t < 12; ++t) {
    const std::vector<double> l{std::pow(0.8, t), 1.0 + 0.01 * (t % 2)};
    s.record_segment(l);
    const auto w = s.step_weights();
    for (int k = 0; k < 2; ++k) {
      hist[k].push_back(l[k]);
      if (hist[k].size() > p.window_h) hist[k].erase(hist[k].begin());
    }
    if (t + 1 > static_cast<int>(p.window_h)) {
      std::vector<double> slopes;
      for (int k = 0; k < 2; ++k) slopes.push_back(oracle::ols_slope(oracle::normalize(hist[k], p.eps)));
      smoothed = oracle::ema(smoothed, oracle::raw_weights(slopes, p.scale_f), p.ema_alpha);
      EXPECT_GT(w[0], 1.0);
      EXPECT_LT(w[1], 1.0);
    }
    EXPECT_NEAR(w[0], smoothed[0], 1e-12);
    EXPECT_NEAR(w[1], smoothed[1], 1e-12);
  }
}

TEST(BalanceState, IdenticalTracesStayAtOnes) {
  BalanceState s(3, {});
  Rng r(8);
  for (int t = 0; t < 20; ++t) {
    const double v = 1 + r.uniform();
    s.record_segment(std::vector<double>{v, v, v});
    EXPECT_EQ(s.step_weights(), (std::vector<double>{1, 1, 1}));
  }
}

TEST(BalanceState, DegenerateWindowKeepsWeights) {
  ControllerParams p;
  p.window_h = 2;
  BalanceState s(2, p);
  for (double v : {2.0, 1.0, 0.5, 1e-9}) s.record_segment(std::vector<double>{v, 1.0});
  const auto before = s.step_weights();
  EXPECT_FALSE(s.last_update_degenerate());
  s.record_segment(std::vector<double>{1e-9, 1.0});
  EXPECT_EQ(s.step_weights(), before);
  EXPECT_TRUE(s.last_update_degenerate());
  EXPECT_FALSE(s.last_warning().empty());
}

TEST(BalanceState, RejectsBadLosses) {
  BalanceState s(2, {});
  EXPECT_THROW(s.record_segment(std::vector<double>{NAN, 1.0}), NonFiniteLoss);
  EXPECT_THROW(s.record_segment(std::vector<double>{-1.0, 1.0}), ValidationError);
  EXPECT_THROW(s.record_segment(std::vector<double>{1.0}), LengthMismatch);
}
