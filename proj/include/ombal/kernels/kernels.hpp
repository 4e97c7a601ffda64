// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Vector inner loops of the synthetic objectives and the optimizer.
//
// Each kernel has a scalar reference and SIMD variants; one table is picked
// at first use from the CPU's capabilities, or forced with the environment
// variable OMBAL_SIMD=scalar|avx2|neon. Element-wise kernels (axpy) are
// bit-identical across variants. Reductions (dot, squared_distance) sum in
// lane order and may differ from the scalar reference in the last bits.

#include <cstddef>
#include <span>
#include <string_view>

namespace ombal::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa);

struct KernelTable {
  Isa isa;
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // sum_k (x_k - y_k)^2
  double (*squared_distance)(const double* x, const double* y, std::size_t n);
};

// Compiled in and supported by the running CPU.
bool available(Isa isa);
// Throws std::invalid_argument when the variant is unavailable.
const KernelTable& table(Isa isa);
const KernelTable& active();

// Span front-ends over active(); lengths must match.
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
double squared_distance(std::span<const double> x, std::span<const double> y);

namespace detail {
const KernelTable& scalar_table();
const KernelTable* avx2_table();  // nullptr when not compiled for x86-64
const KernelTable* neon_table();  // nullptr when not compiled for aarch64
}  // namespace detail

}  // namespace ombal::kernels
