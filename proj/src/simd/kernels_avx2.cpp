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

#if defined(__x86_64__) || defined(_M_X64)
#define CRASHRISK_HAVE_AVX2 1
#include <immintrin.h>
#else
#define CRASHRISK_HAVE_AVX2 0
#endif

namespace crashrisk::simd {

#if CRASHRISK_HAVE_AVX2
namespace {

// Only AVX2 is enabled, not FMA: mul + add keeps rounding identical to the
// scalar reference.
#define CRASHRISK_AVX2 __attribute__((target("avx2")))

CRASHRISK_AVX2 inline double combine_lanes(__m256d acc) {
  alignas(32) double l[4];
  _mm256_store_pd(l, acc);
  return (l[0] + l[1]) + (l[2] + l[3]);
}

CRASHRISK_AVX2 double dot_avx2(const double* a, const double* b, std::size_t n) {
  const std::size_t n4 = n & ~std::size_t{3};
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < n4; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double s = combine_lanes(acc);
  for (std::size_t i = n4; i < n; ++i) s += a[i] * b[i];
  return s;
}

CRASHRISK_AVX2 void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const std::size_t n4 = n & ~std::size_t{3};
  const __m256d va = _mm256_set1_pd(alpha);
  for (std::size_t i = 0; i < n4; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(va, _mm256_loadu_pd(x + i))));
  }
  for (std::size_t i = n4; i < n; ++i) y[i] += alpha * x[i];
}

CRASHRISK_AVX2 double sum_avx2(const double* a, std::size_t n) {
  const std::size_t n4 = n & ~std::size_t{3};
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < n4; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double s = combine_lanes(acc);
  for (std::size_t i = n4; i < n; ++i) s += a[i];
  return s;
}

CRASHRISK_AVX2 double sum_sq_diff_avx2(const double* a, const double* b, std::size_t n) {
  const std::size_t n4 = n & ~std::size_t{3};
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double s = combine_lanes(acc);
  for (std::size_t i = n4; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

CRASHRISK_AVX2 double sum_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
  const std::size_t n4 = n & ~std::size_t{3};
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign, d));
  }
  double s = combine_lanes(acc);
  for (std::size_t i = n4; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d < 0.0 ? -d : d;
  }
  return s;
}

const KernelTable kAvx2Kernels = {Isa::avx2, dot_avx2, axpy_avx2, sum_avx2, sum_sq_diff_avx2, sum_abs_diff_avx2};

}  // namespace

namespace detail {
const KernelTable* avx2_kernels() { return &kAvx2Kernels; }
}  // namespace detail

#else

namespace detail {
const KernelTable* avx2_kernels() { return nullptr; }
}  // namespace detail

#endif

}  // namespace crashrisk::simd
