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

#include <cmath>

#include "crashrisk/simd/kernels.hpp"

namespace crashrisk::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  const std::size_t n4 = n & ~std::size_t{3};
  double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
  for (std::size_t i = 0; i < n4; i += 4) {
    l0 += a[i] * b[i];
    l1 += a[i + 1] * b[i + 1];
    l2 += a[i + 2] * b[i + 2];
    l3 += a[i + 3] * b[i + 3];
  }
  double s = (l0 + l1) + (l2 + l3);
  for (std::size_t i = n4; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum_scalar(const double* a, std::size_t n) {
  const std::size_t n4 = n & ~std::size_t{3};
  double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
  for (std::size_t i = 0; i < n4; i += 4) {
    l0 += a[i];
    l1 += a[i + 1];
    l2 += a[i + 2];
    l3 += a[i + 3];
  }
  double s = (l0 + l1) + (l2 + l3);
  for (std::size_t i = n4; i < n; ++i) s += a[i];
  return s;
}

double sum_sq_diff_scalar(const double* a, const double* b, std::size_t n) {
  const std::size_t n4 = n & ~std::size_t{3};
  double l[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n4; i += 4) {
    for (std::size_t j = 0; j < 4; ++j) {
      const double d = a[i + j] - b[i + j];
      l[j] += d * d;
    }
  }
  double s = (l[0] + l[1]) + (l[2] + l[3]);
  for (std::size_t i = n4; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double sum_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
  const std::size_t n4 = n & ~std::size_t{3};
  double l[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n4; i += 4) {
    for (std::size_t j = 0; j < 4; ++j) l[j] += std::fabs(a[i + j] - b[i + j]);
  }
  double s = (l[0] + l[1]) + (l[2] + l[3]);
  for (std::size_t i = n4; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

}  // namespace

namespace detail {
const KernelTable kScalarKernels = {Isa::scalar,      dot_scalar,         axpy_scalar,
                                    sum_scalar,       sum_sq_diff_scalar, sum_abs_diff_scalar};
}  // namespace detail

}  // namespace crashrisk::simd
