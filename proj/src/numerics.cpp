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

#include "crashrisk/numerics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "crashrisk/simd/kernels.hpp"

namespace crashrisk::numerics {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoef = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7,
};

using EigenMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const EigenMatrix> as_eigen(const DenseMatrix& m) {
  return Eigen::Map<const EigenMatrix>(m.values.data(), static_cast<Eigen::Index>(m.rows),
                                       static_cast<Eigen::Index>(m.cols));
}

double max_diagonal(const DenseMatrix& g) {
  double d = 0.0;
  for (std::size_t i = 0; i < g.rows; ++i) d = std::max(d, g(i, i));
  return d;
}

std::string column_label(std::span<const std::string> names, std::size_t j) {
  if (j < names.size()) return names[j];
  return "column " + std::to_string(j);
}

// Columns with a non-negligible loading on some null-space eigenvector.
std::vector<std::size_t> dependent_columns(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& eig, double tol) {
  std::vector<std::size_t> cols;
  const auto& vals = eig.eigenvalues();
  const auto& vecs = eig.eigenvectors();
  for (Eigen::Index k = 0; k < vals.size(); ++k) {
    if (vals[k] > tol) continue;
    for (Eigen::Index j = 0; j < vecs.rows(); ++j) {
      if (std::fabs(vecs(j, k)) > 0.1) cols.push_back(static_cast<std::size_t>(j));
    }
  }
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  return cols;
}

// Cholesky that also rejects numerically semi-definite input.
bool try_cholesky(const Eigen::MatrixXd& g, double pivot_floor, Eigen::LLT<Eigen::MatrixXd>& llt) {
  llt.compute(g);
  if (llt.info() != Eigen::Success) return false;
  const auto diag = llt.matrixLLT().diagonal();
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (!(diag[i] * diag[i] > pivot_floor)) return false;
  }
  return true;
}

}  // namespace

double ln_gamma(double x) {
  if (!(x > 0.0)) {
    throw Error(ErrorKind::numeric, "domain", "ln_gamma requires x > 0");
  }
  if (x < 0.5) {
    // Reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x).
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - ln_gamma(1.0 - x);
  }
  const double xm1 = x - 1.0;
  double a = kLanczosCoef[0];
  const double t = xm1 + kLanczosG + 0.5;
  for (std::size_t i = 1; i < kLanczosCoef.size(); ++i) a += kLanczosCoef[i] / (xm1 + static_cast<double>(i));
  // 0.5 * ln(2 pi)
  constexpr double kHalfLog2Pi = 0.91893853320467274178;
  return kHalfLog2Pi + (xm1 + 0.5) * std::log(t) - t + std::log(a);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_two_sided_p(double z) { return std::erfc(std::fabs(z) / std::numbers::sqrt2); }

double student_t_upper_tail(double t, double dof) {
  if (std::isnan(t)) return 1.0;
  if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
  const boost::math::students_t_distribution<double> dist(dof);
  return boost::math::cdf(boost::math::complement(dist, t));
}

DenseMatrix weighted_gram(const DenseMatrix& x, std::span<const double> w) {
  const std::size_t p = x.cols;
  DenseMatrix g(p, p);
  const auto& k = simd::kernels();
  for (std::size_t i = 0; i < x.rows; ++i) {
    const double* row = x.values.data() + i * p;
    const double wi = w[i];
    for (std::size_t j = 0; j < p; ++j) {
      if (row[j] == 0.0) continue;
      // Upper triangle only: g[j][j..p) += (w x_j) x[j..p)
      k.axpy(wi * row[j], row + j, g.values.data() + j * p + j, p - j);
    }
  }
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t c = j + 1; c < p; ++c) g(c, j) = g(j, c);
  }
  return g;
}

std::vector<double> weighted_cross(const DenseMatrix& x, std::span<const double> w, std::span<const double> z) {
  const std::size_t p = x.cols;
  std::vector<double> out(p, 0.0);
  const auto& k = simd::kernels();
  for (std::size_t i = 0; i < x.rows; ++i) {
    k.axpy(w[i] * z[i], x.values.data() + i * p, out.data(), p);
  }
  return out;
}

SymmetricSolveResult solve_symmetric(const DenseMatrix& gram, std::span<const double> rhs, SolveMode mode,
                                     std::span<const std::string> column_names) {
  const auto p = static_cast<Eigen::Index>(gram.rows);
  const Eigen::MatrixXd g = as_eigen(gram);
  const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), p);
  const double scale = std::max(max_diagonal(gram), std::numeric_limits<double>::min());
  SymmetricSolveResult result;
  result.solution.resize(static_cast<std::size_t>(p));
  Eigen::Map<Eigen::VectorXd> out(result.solution.data(), p);

  if (mode == SolveMode::min_norm) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
    const double tol = 1e-8 * scale;
    Eigen::VectorXd proj = eig.eigenvectors().transpose() * b;
    for (Eigen::Index k = 0; k < p; ++k) {
      const double lambda = eig.eigenvalues()[k];
      if (lambda > tol) {
        proj[k] /= lambda;
        ++result.rank;
      } else {
        proj[k] = 0.0;
      }
    }
    out = eig.eigenvectors() * proj;
    return result;
  }

  Eigen::LLT<Eigen::MatrixXd> llt;
  const double pivot_floor = 1e-13 * scale;
  if (try_cholesky(g, pivot_floor, llt)) {
    out = llt.solve(b);
    result.rank = static_cast<std::size_t>(p);
    return result;
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
  const double lambda_max = std::max(eig.eigenvalues().maxCoeff(), 0.0);
  const double rank_tol = 1e-10 * std::max(lambda_max, scale);
  if (eig.eigenvalues().minCoeff() <= rank_tol) {
    const auto cols = dependent_columns(eig, rank_tol);
    std::ostringstream msg;
    msg << "singular normal equations; linearly dependent columns:";
    for (std::size_t j : cols) msg << ' ' << column_label(column_names, j);
    throw SingularSystemError(cols, msg.str());
  }
  // Full rank but ill-conditioned: escalate diagonal jitter.
  for (double jitter = 1e-10; jitter <= 1e-6 * 1.0000001; jitter *= 10.0) {
    Eigen::MatrixXd gj = g;
    gj.diagonal().array() += jitter * scale;
    if (try_cholesky(gj, pivot_floor, llt)) {
      out = llt.solve(b);
      result.jitter_applied = jitter;
      result.condition_flag = true;
      result.rank = static_cast<std::size_t>(p);
      return result;
    }
  }
  throw SingularSystemError({}, "normal equations could not be factorized even with jitter 1e-6");
}

DenseMatrix inverse_symmetric(const DenseMatrix& gram, SolveMode mode) {
  const std::size_t p = gram.rows;
  DenseMatrix inv(p, p);
  Eigen::Map<EigenMatrix> out(inv.values.data(), static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  const Eigen::MatrixXd g = as_eigen(gram);
  const double scale = std::max(max_diagonal(gram), std::numeric_limits<double>::min());
  if (mode == SolveMode::strict) {
    Eigen::LLT<Eigen::MatrixXd> llt;
    if (try_cholesky(g, 1e-13 * scale, llt)) {
      out = llt.solve(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p)));
    } else {
      // Falls through to the pseudo-inverse only for callers that already
      // accepted a jittered solve; the result is flagged by the caller.
      mode = SolveMode::min_norm;
    }
  }
  if (mode == SolveMode::min_norm) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
    const double tol = 1e-8 * scale;
    Eigen::VectorXd inv_vals(eig.eigenvalues().size());
    for (Eigen::Index k = 0; k < inv_vals.size(); ++k) {
      const double lambda = eig.eigenvalues()[k];
      inv_vals[k] = lambda > tol ? 1.0 / lambda : 0.0;
    }
    out = eig.eigenvectors() * inv_vals.asDiagonal() * eig.eigenvectors().transpose();
  }
  // Exact symmetry.
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) inv(j, i) = inv(i, j);
  }
  return inv;
}

SymmetricSolveResult solve_weighted_ls(const DenseMatrix& x, std::span<const double> w, std::span<const double> z,
                                       SolveMode mode, std::span<const std::string> column_names) {
  const DenseMatrix g = weighted_gram(x, w);
  const std::vector<double> rhs = weighted_cross(x, w, z);
  return solve_symmetric(g, rhs, mode, column_names);
}

}  // namespace crashrisk::numerics
