// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace ombal {

// Seeded random source shared by every module.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Distributions are implemented here on top of raw engine output
// instead of std::*_distribution, whose algorithms vary between standard
// library vendors. Traces are therefore reproducible for a given seed on any
// conforming toolchain, though bit-equality with other implementations of
// this tool is not promised.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64+splitmix64-seed/v1";

  explicit Rng(std::uint64_t seed);

  // Independent stream for (purpose, index). Sub-stream seeds are
  // splitmix64(seed ^ tag(purpose) ^ index), so per-task streams are keyed
  // by seed xor task index.
  Rng substream(std::string_view purpose, std::uint64_t index = 0) const;

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  // Unbiased integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);
  // Standard normal via the Box-Muller transform.
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace ombal
