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
#include <span>
#include <string>
#include <vector>

#include "crashrisk/error.hpp"

namespace crashrisk::numerics {

/// Dense row-major matrix.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }
  std::span<double> row(std::size_t r) { return {values.data() + r * cols, cols}; }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;
};

/// Natural log of the gamma function for x > 0 (Lanczos, g = 7, 9 terms,
/// reflection below 0.5). Throws Error(numeric, "domain") for x <= 0.
double ln_gamma(double x);

/// Standard normal CDF.
double normal_cdf(double z);

/// Two-sided normal tail probability 2 * (1 - Phi(|z|)), computed without
/// cancellation.
double normal_two_sided_p(double z);

/// P(T > t) for Student's t with `dof` degrees of freedom.
double student_t_upper_tail(double t, double dof);

enum class SolveMode {
  strict,    // symmetric positive definite; singular systems are an error
  min_norm,  // minimum-norm solution of a possibly rank-deficient system
};

struct SymmetricSolveResult {
  std::vector<double> solution;
  double jitter_applied = 0.0;  // relative to the largest diagonal entry
  bool condition_flag = false;  // set when the unjittered factorization failed
  std::size_t rank = 0;
};

/// Thrown by strict solves on structurally singular systems.
class SingularSystemError : public Error {
 public:
  SingularSystemError(std::vector<std::size_t> dependent, const std::string& message)
      : Error(ErrorKind::numeric, "singular_system", message), dependent_(std::move(dependent)) {}
  const std::vector<std::size_t>& dependent_columns() const { return dependent_; }

 private:
  std::vector<std::size_t> dependent_;
};

/// X' W X for row-major X (n x p) and weights w. Zero entries of X are skipped,
/// which makes dummy-coded designs cheap.
DenseMatrix weighted_gram(const DenseMatrix& x, std::span<const double> w);

/// X' (w .* z).
std::vector<double> weighted_cross(const DenseMatrix& x, std::span<const double> w, std::span<const double> z);

/// Solves gram * beta = rhs for symmetric positive semi-definite `gram`.
/// `column_names` (optional) label columns in singularity errors.
SymmetricSolveResult solve_symmetric(const DenseMatrix& gram, std::span<const double> rhs, SolveMode mode,
                                     std::span<const std::string> column_names = {});

/// Inverse (strict) or Moore-Penrose pseudo-inverse (min_norm) of a symmetric
/// positive semi-definite matrix.
DenseMatrix inverse_symmetric(const DenseMatrix& gram, SolveMode mode);

/// Weighted least squares: solves (X'WX) beta = X'Wz.
SymmetricSolveResult solve_weighted_ls(const DenseMatrix& x, std::span<const double> w, std::span<const double> z,
                                       SolveMode mode, std::span<const std::string> column_names = {});

}  // namespace crashrisk::numerics
