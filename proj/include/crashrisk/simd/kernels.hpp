// Copyright 2026 The crashrisk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

// Data-parallel inner loops used by the estimators.
//
// Every reduction uses the same association order regardless of ISA:
// four lane accumulators over the first n & ~3 elements (lane j takes
// elements i with i % 4 == j), combined as (l0 + l1) + (l2 + l3), then the
// tail added left to right. No fused multiply-add is used. Consequently the
// scalar reference and every SIMD variant return bitwise identical results,
// and fitted models do not depend on which kernel the dispatcher picked.

namespace crashrisk::simd {

enum class Isa { scalar, avx2, neon };

struct KernelTable {
  Isa isa;
  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// sum_i a[i]
  double (*sum)(const double* a, std::size_t n);
  /// sum_i (a[i] - b[i])^2
  double (*sum_sq_diff)(const double* a, const double* b, std::size_t n);
  /// sum_i |a[i] - b[i]|
  double (*sum_abs_diff)(const double* a, const double* b, std::size_t n);
};

std::string_view isa_name(Isa isa);
std::optional<Isa> parse_isa(std::string_view name);

/// Whether this build contains the variant and the running CPU supports it.
bool isa_supported(Isa isa);
/// Best supported ISA on this machine.
Isa best_isa();

/// Table for a specific ISA. Throws crashrisk::Error when unsupported.
const KernelTable& kernels_for(Isa isa);

/// Active table. Chosen on first use: CRASHRISK_ISA (scalar|avx2|neon) if
/// set and supported, otherwise best_isa().
const KernelTable& kernels();
Isa active_isa();
/// Overrides the active table for the whole process.
void set_active_isa(Isa isa);

// Span conveniences over the active table.
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double sum(std::span<const double> a);
double sum_sq_diff(std::span<const double> a, std::span<const double> b);
double sum_abs_diff(std::span<const double> a, std::span<const double> b);

/// out[r] = dot(row r of the row-major rows x cols matrix, v).
void gemv_rows(std::span<const double> matrix, std::size_t rows, std::size_t cols, std::span<const double> v,
               std::span<double> out);

namespace detail {
extern const KernelTable kScalarKernels;
const KernelTable* avx2_kernels();  // nullptr when not compiled in
const KernelTable* neon_kernels();  // nullptr when not compiled in
}  // namespace detail

}  // namespace crashrisk::simd
