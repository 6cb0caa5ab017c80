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

#include <atomic>
#include <cstdlib>
#include <string>

#include "crashrisk/error.hpp"
#include "crashrisk/simd/kernels.hpp"

namespace crashrisk::simd {
namespace {

bool cpu_has_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  if (const char* env = std::getenv("CRASHRISK_ISA")) {
    if (auto isa = parse_isa(env); isa && isa_supported(*isa)) return &kernels_for(*isa);
  }
  return &kernels_for(best_isa());
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

std::optional<Isa> parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  if (name == "neon") return Isa::neon;
  return std::nullopt;
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
      return detail::avx2_kernels() != nullptr && cpu_has_avx2();
    case Isa::neon:
      // NEON is mandatory on AArch64.
      return detail::neon_kernels() != nullptr;
  }
  return false;
}

Isa best_isa() {
  if (isa_supported(Isa::avx2)) return Isa::avx2;
  if (isa_supported(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_supported(isa)) {
    throw Error(ErrorKind::usage, "unsupported_isa",
                "kernel ISA '" + std::string(isa_name(isa)) + "' is not available on this machine");
  }
  switch (isa) {
    case Isa::avx2:
      return *detail::avx2_kernels();
    case Isa::neon:
      return *detail::neon_kernels();
    case Isa::scalar:
      break;
  }
  return detail::kScalarKernels;
}

const KernelTable& kernels() { return *active_slot().load(std::memory_order_acquire); }

Isa active_isa() { return kernels().isa; }

void set_active_isa(Isa isa) { active_slot().store(&kernels_for(isa), std::memory_order_release); }

double dot(std::span<const double> a, std::span<const double> b) { return kernels().dot(a.data(), b.data(), a.size()); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  kernels().axpy(alpha, x.data(), y.data(), x.size());
}

double sum(std::span<const double> a) { return kernels().sum(a.data(), a.size()); }

double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
  return kernels().sum_sq_diff(a.data(), b.data(), a.size());
}

double sum_abs_diff(std::span<const double> a, std::span<const double> b) {
  return kernels().sum_abs_diff(a.data(), b.data(), a.size());
}

void gemv_rows(std::span<const double> matrix, std::size_t rows, std::size_t cols, std::span<const double> v,
               std::span<double> out) {
  const auto& k = kernels();
  for (std::size_t r = 0; r < rows; ++r) out[r] = k.dot(matrix.data() + r * cols, v.data(), cols);
}

}  // namespace crashrisk::simd
