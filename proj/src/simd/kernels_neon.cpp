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

#include "crashrisk/simd/kernels.hpp"

#if defined(__aarch64__) || defined(_M_ARM64)
#define CRASHRISK_HAVE_NEON 1
#include <arm_neon.h>
#else
#define CRASHRISK_HAVE_NEON 0
#endif

namespace crashrisk::simd {

#if CRASHRISK_HAVE_NEON
namespace {

// Two float64x2 registers hold lanes {0,1} and {2,3} so the association
// order matches the four-lane reference. vmulq + vaddq, never vfmaq.

inline double combine_lanes(float64x2_t lo, float64x2_t hi) {
  const double l0 = vgetq_lane_f64(lo, 0), l1 = vgetq_lane_f64(lo, 1);
  const double l2 = vgetq_lane_f64(hi, 0), l3 = vgetq_lane_f64(hi, 1);
  return (l0 + l1) + (l2 + l3);
}

double dot_neon(const double* a, const double* b, std::size_t n) {
  const std::size_t n4 = n & ~std::size_t{3};
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  for (std::size_t i = 0; i < n4; i += 4) {
    lo = vaddq_f64(lo, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    hi = vaddq_f64(hi, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double s = combine_lanes(lo, hi);
  for (std::size_t i = n4; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const std::size_t n2 = n & ~std::size_t{1};
  const float64x2_t va = vdupq_n_f64(alpha);
  for (std::size_t i = 0; i < n2; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  }
  for (std::size_t i = n2; i < n; ++i) y[i] += alpha * x[i];
}

double sum_neon(const double* a, std::size_t n) {
  const std::size_t n4 = n & ~std::size_t{3};
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  for (std::size_t i = 0; i < n4; i += 4) {
    lo = vaddq_f64(lo, vld1q_f64(a + i));
    hi = vaddq_f64(hi, vld1q_f64(a + i + 2));
  }
  double s = combine_lanes(lo, hi);
  for (std::size_t i = n4; i < n; ++i) s += a[i];
  return s;
}

double sum_sq_diff_neon(const double* a, const double* b, std::size_t n) {
  const std::size_t n4 = n & ~std::size_t{3};
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  for (std::size_t i = 0; i < n4; i += 4) {
    const float64x2_t d0 = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    const float64x2_t d1 = vsubq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    lo = vaddq_f64(lo, vmulq_f64(d0, d0));
    hi = vaddq_f64(hi, vmulq_f64(d1, d1));
  }
  double s = combine_lanes(lo, hi);
  for (std::size_t i = n4; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double sum_abs_diff_neon(const double* a, const double* b, std::size_t n) {
  const std::size_t n4 = n & ~std::size_t{3};
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  for (std::size_t i = 0; i < n4; i += 4) {
    lo = vaddq_f64(lo, vabsq_f64(vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i))));
    hi = vaddq_f64(hi, vabsq_f64(vsubq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2))));
  }
  double s = combine_lanes(lo, hi);
  for (std::size_t i = n4; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d < 0.0 ? -d : d;
  }
  return s;
}

const KernelTable kNeonKernels = {Isa::neon, dot_neon, axpy_neon, sum_neon, sum_sq_diff_neon, sum_abs_diff_neon};

}  // namespace

namespace detail {
const KernelTable* neon_kernels() { return &kNeonKernels; }
}  // namespace detail

#else

namespace detail {
const KernelTable* neon_kernels() { return nullptr; }
}  // namespace detail

#endif

}  // namespace crashrisk::simd
