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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "crashrisk/numerics.hpp"
#include "crashrisk/rng.hpp"

using namespace crashrisk;
using namespace crashrisk::numerics;

namespace {

// 30-digit references, frozen from an arbitrary-precision library.
struct LnGammaRef {
  double x;
  double value;
};
const LnGammaRef kLnGamma[] = {
    {0.001, 6.9071788853838536825},  {0.1, 2.2527126517342059599},    {0.5, 0.57236494292470008707},
    {1.0, 0.0},                      {1.5, -0.12078223763524522235},  {2.0, 0.0},
    {3.7, 1.4280723266653879219},    {10.0, 12.801827480081469611},   {25.5, 56.389167643719946744},
    {100.0, 359.13420536957539878},  {1234.5, 7550.5509010778948957}, {1e6, 12815504.56914761166},
};

// Composite Simpson integration of the standard normal density over [-12, z].
double normal_cdf_oracle(double z) {
  const int n = 20000;
  const double a = -12.0, h = (z - a) / n;
  auto f = [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI); };
  double s = f(a) + f(z);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

DenseMatrix from_rows(std::vector<std::vector<double>> rows) {
  DenseMatrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

}  // namespace

TEST_CASE("ln_gamma against frozen references") {
  for (const auto& r : kLnGamma) {
    const double got = ln_gamma(r.x);
    if (r.value == 0.0) {
      CHECK(std::abs(got) < 1e-14);
    } else {
      CHECK(std::abs(got - r.value) <= 1e-10 * std::abs(r.value));
    }
  }
  CHECK(ln_gamma(0.5) == doctest::Approx(0.5723649429).epsilon(1e-10));
  CHECK_THROWS_AS(ln_gamma(0.0), Error);
  CHECK_THROWS_AS(ln_gamma(-1.0), Error);
}

TEST_CASE("ln_gamma recurrence") {
  for (double x : {0.5, 1.5, 10.0, 1000.0}) CHECK(std::abs(ln_gamma(x + 1) - ln_gamma(x) - std::log(x)) <= 1e-9);
}

TEST_CASE("normal_cdf") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(std::abs(normal_cdf(1.959964) - 0.975) <= 1e-4);
  for (double z : {-6.0, -3.1, -1.0, -0.2, 0.7, 1.959964, 2.5, 4.0}) {
    CHECK(std::abs(normal_cdf(z) - normal_cdf_oracle(z)) <= 1e-7);
  }
  Rng rng(21);
  for (int i = 0; i < 100; ++i) {
    const double z = (rng.uniform() - 0.5) * 16;
    CHECK(std::abs(normal_cdf(-z) - (1.0 - normal_cdf(z))) <= 1e-15);
  }
  double prev = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double v = normal_cdf(-8.0 + 16.0 * i / 10000.0);
    REQUIRE(v >= prev);
    prev = v;
  }
  CHECK(normal_two_sided_p(2.0) == doctest::Approx(0.0455).epsilon(1e-3));
  CHECK(normal_two_sided_p(0.0) == 1.0);
}

TEST_CASE("student t tail") {
  CHECK(student_t_upper_tail(0.0, 5.0) == doctest::Approx(0.5));
  // t with 1 dof is Cauchy: P(T > 1) = 1/4.
  CHECK(student_t_upper_tail(1.0, 1.0) == doctest::Approx(0.25).epsilon(1e-12));
  // Large dof approaches the normal tail.
  CHECK(student_t_upper_tail(1.644854, 1e7) == doctest::Approx(0.05).epsilon(1e-4));
}

TEST_CASE("weighted least squares examples") {
  const DenseMatrix id = from_rows({{1, 0}, {0, 1}});
  const std::vector<double> w{1, 1};
  auto r = solve_weighted_ls(id, w, std::vector<double>{3, 5}, SolveMode::strict);
  CHECK(r.solution[0] == doctest::Approx(3));
  CHECK(r.solution[1] == doctest::Approx(5));
  const DenseMatrix ones = from_rows({{1}, {1}});
  r = solve_weighted_ls(ones, w, std::vector<double>{2, 4}, SolveMode::strict);
  CHECK(r.solution[0] == doctest::Approx(3));
}

TEST_CASE("duplicated column: strict fails, min_norm splits the weight") {
  const DenseMatrix x = from_rows({{1, 1}, {2, 2}, {3, 3}});
  const std::vector<double> w{1, 1, 1}, z{1, 2, 3};
  const std::vector<std::string> names{"a", "b"};
  try {
    solve_weighted_ls(x, w, z, SolveMode::strict, names);
    FAIL("expected a singular system error");
  } catch (const SingularSystemError& e) {
    CHECK_FALSE(e.dependent_columns().empty());
    CHECK(std::string(e.what()).find('b') != std::string::npos);
  }
  const auto r = solve_weighted_ls(x, w, z, SolveMode::min_norm);
  // Least-squares fits b1 + b2 = 1; the minimum-norm point is (0.5, 0.5).
  CHECK(r.solution[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(r.solution[1] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(r.rank == 1);
}

TEST_CASE("normal equations residual property") {
  Rng rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 50, p = 5;
    DenseMatrix x(n, p);
    std::vector<double> w(n), z(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) x(i, j) = rng.normal();
      w[i] = 0.1 + rng.uniform();
      z[i] = rng.normal() * 3;
    }
    const auto r = solve_weighted_ls(x, w, z, SolveMode::strict);
    REQUIRE(r.jitter_applied == 0.0);
    std::vector<double> resid(n);
    for (std::size_t i = 0; i < n; ++i) {
      double fit = 0.0;
      for (std::size_t j = 0; j < p; ++j) fit += x(i, j) * r.solution[j];
      resid[i] = z[i] - fit;
    }
    const auto g = weighted_cross(x, w, resid);
    const auto rhs = weighted_cross(x, w, z);
    double gmax = 0.0, rmax = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      gmax = std::max(gmax, std::abs(g[j]));
      rmax = std::max(rmax, std::abs(rhs[j]));
    }
    CHECK(gmax <= 1e-6 * (1 + rmax));
  }
}

TEST_CASE("inverse and pseudo-inverse") {
  const DenseMatrix a = from_rows({{4, 1}, {1, 3}});
  const auto inv = inverse_symmetric(a, SolveMode::strict);
  CHECK(inv(0, 0) == doctest::Approx(3.0 / 11));
  CHECK(inv(0, 1) == doctest::Approx(-1.0 / 11));
  CHECK(inv(1, 1) == doctest::Approx(4.0 / 11));
  const DenseMatrix s = from_rows({{1, 1}, {1, 1}});
  const auto pinv = inverse_symmetric(s, SolveMode::min_norm);
  for (double v : pinv.values) CHECK(v == doctest::Approx(0.25));
}
