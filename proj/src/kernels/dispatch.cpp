// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#include <cassert>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "ombal/kernels/kernels.hpp"

namespace ombal::kernels {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "?";
}

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& pick() {
  if (const char* forced = std::getenv("OMBAL_SIMD")) {
    const std::string_view name(forced);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
      if (to_string(isa) == name) return table(isa);
    throw std::invalid_argument("OMBAL_SIMD: unknown kernel variant '" + std::string(name) + "'");
  }
  if (available(Isa::avx2)) return table(Isa::avx2);
  if (available(Isa::neon)) return table(Isa::neon);
  return detail::scalar_table();
}

}  // namespace

bool available(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: return detail::avx2_table() != nullptr && cpu_has_avx2();
    case Isa::neon: return detail::neon_table() != nullptr;
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!available(isa))
    throw std::invalid_argument("kernel variant '" + std::string(to_string(isa)) + "' is not available");
  switch (isa) {
    case Isa::avx2: return *detail::avx2_table();
    case Isa::neon: return *detail::neon_table();
    default: return detail::scalar_table();
  }
}

const KernelTable& active() {
  static const KernelTable& chosen = pick();
  return chosen;
}

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return active().dot(x.data(), y.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(a, x.data(), y.data(), x.size());
}

double squared_distance(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return active().squared_distance(x.data(), y.data(), x.size());
}

}  // namespace ombal::kernels
